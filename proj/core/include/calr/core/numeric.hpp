#pragma once

#include "calr/core/types.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace calr {

/// Scales every row to unit L2 norm. Throws InvalidArgument naming the first zero row.
[[nodiscard]] Matrix l2_normalize_rows(const Matrix& m);

/// Euclidean distance matrix between rows. Each unordered pair is computed once
/// and mirrored, so the result is exactly symmetric with a zero diagonal.
[[nodiscard]] Matrix pairwise_distance(const Matrix& rows);

/// x*log2(x), with the continuous extension 0 at x = 0.
[[nodiscard]] double plogp(double x);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is run
/// exactly once; callers write to disjoint outputs so results do not depend
/// on the worker count.
/// Shortest decimal text that parses back to exactly `x`.
[[nodiscard]] std::string shortest_repr(double x);

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace calr
