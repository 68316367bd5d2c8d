#pragma once

#include <Eigen/Core>

namespace uavpm {
namespace util {

template <class T>
using vec_type = Eigen::Vector<T, Eigen::Dynamic>;

template <class T>
using vec2_type = Eigen::Vector2<T>;

// K anchor points stored column-wise.
template <class T>
using points_type = Eigen::Matrix<T, 2, Eigen::Dynamic>;

}  // namespace util

// Outcome of a subproblem solve. Infeasibility is data, not an exception,
// so the coordinator can surface which block failed.
enum class BlockStatus { ok, infeasible };

enum class Block { altbeam, location, bandwidth };

inline const char* to_string(Block b) {
    switch (b) {
        case Block::altbeam: return "altbeam";
        case Block::location: return "location";
        default: return "bandwidth";
    }
}

}  // namespace uavpm
