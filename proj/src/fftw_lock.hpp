#pragma once

#include <mutex>

namespace clutter::detail {

/// FFTW's planner is not reentrant; every plan creation and destruction
/// happens under this lock.
std::mutex& fftw_planner_mutex();

}  // namespace clutter::detail
