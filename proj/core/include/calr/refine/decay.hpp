#pragma once

#include <string>
#include <string_view>

namespace calr::refine {

enum class DecaySchedule { None, Linear, Polynomial, Exponential, Cosine };

/// Discard probability at epoch t of T:
///   None         p_start
///   Linear       p_start - (p_start - p_end) * t / T
///   Polynomial   p_end + (p_start - p_end) * (1 - t/T)^2
///   Exponential  p_end + (p_start - p_end) * exp(-5 t / T)
///   Cosine       p_end + (p_start - p_end) * (1 + cos(pi t / T)) / 2
/// T == 0 returns p_start. Requires 0 <= t <= T and 0 <= p_end <= p_start <= 1.
[[nodiscard]] double decay_probability(DecaySchedule schedule, int t, int total, double p_start,
                                       double p_end);

[[nodiscard]] std::string_view to_string(DecaySchedule schedule);
/// Case-insensitive; throws InvalidArgument on unknown names.
[[nodiscard]] DecaySchedule parse_schedule(std::string_view name);

}  // namespace calr::refine
