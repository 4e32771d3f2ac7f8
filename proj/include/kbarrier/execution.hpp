#pragma once

namespace kbarrier {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// bitwise-identical results; the serial path exists for testing and as the
/// baseline in the benchmark target.
enum class Execution { serial, parallel };

}  // namespace kbarrier
