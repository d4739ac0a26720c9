#include "calr/refine/decay.hpp"

#include "calr/core/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace calr::refine {

double decay_probability(DecaySchedule schedule, int t, int total, double p_start, double p_end) {
  if (!(0.0 <= p_end && p_end <= p_start && p_start <= 1.0)) {
    throw InvalidArgument("decay_probability: need 0 <= p_end <= p_start <= 1");
  }
  if (total == 0) return p_start;
  if (total < 0 || t < 0 || t > total) {
    throw InvalidArgument("decay_probability: need 0 <= t <= T, got t=" + std::to_string(t) +
                          ", T=" + std::to_string(total));
  }
  const double x = static_cast<double>(t) / static_cast<double>(total);
  const double span = p_start - p_end;
  switch (schedule) {
    case DecaySchedule::None:
      return p_start;
    case DecaySchedule::Linear:
      return p_start - span * x;
    case DecaySchedule::Polynomial:
      return p_end + span * (1.0 - x) * (1.0 - x);
    case DecaySchedule::Exponential:
      return p_end + span * std::exp(-5.0 * x);
    case DecaySchedule::Cosine:
      return p_end + 0.5 * span * (1.0 + std::cos(std::numbers::pi * x));
  }
  throw InvalidArgument("decay_probability: unknown schedule");
}

std::string_view to_string(DecaySchedule schedule) {
  switch (schedule) {
    case DecaySchedule::None: return "none";
    case DecaySchedule::Linear: return "linear";
    case DecaySchedule::Polynomial: return "polynomial";
    case DecaySchedule::Exponential: return "exponential";
    case DecaySchedule::Cosine: return "cosine";
  }
  return "unknown";
}

DecaySchedule parse_schedule(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto s : {DecaySchedule::None, DecaySchedule::Linear, DecaySchedule::Polynomial,
                 DecaySchedule::Exponential, DecaySchedule::Cosine}) {
    if (lower == to_string(s)) return s;
  }
  throw InvalidArgument("unknown decay schedule '" + std::string(name) + "'");
}

}  // namespace calr::refine
