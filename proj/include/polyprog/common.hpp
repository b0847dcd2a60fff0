// Shared foundation for the polyprog library: exact coefficient types,
// error taxonomy, deterministic parallel loops, and number formatting.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace polyprog {

// Exact arbitrary-precision integers and rationals used for all symbolic
// coefficient arithmetic (resultants and local densities must be exact).
// Expression templates are disabled so arithmetic results are concrete
// values, usable directly in containers and generic code.
using Int = boost::multiprecision::number<
    boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<
        boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

// Caller passed arguments violating a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

// A computation exceeded its configured enumeration/step budget.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant that should hold by construction was measured to
// fail; carries a human-readable trace of the run so far.
class InvariantError : public std::runtime_error {
 public:
  InvariantError(const std::string& what, std::string trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::string& trace() const { return trace_; }

 private:
  std::string trace_;
};

// ---------------------------------------------------------------------------
// Deterministic parallel loops
// ---------------------------------------------------------------------------

// Number of worker threads: POLYPROG_THREADS if set, else hardware count.
int thread_count();

// Runs body(chunk_index, begin, end) over [0, n) split into fixed chunks.
// The chunk decomposition depends only on n, never on the thread count, so
// any per-chunk accumulation combined in chunk order is deterministic.
void parallel_chunks(
    std::int64_t n,
    const std::function<void(int chunk, std::int64_t begin, std::int64_t end)>&
        body);

// Convenience: deterministic parallel sum of term(i) for i in [0, n).
// Terms are accumulated per chunk and the chunk sums are added in order.
double parallel_sum(std::int64_t n,
                    const std::function<double(std::int64_t)>& term);

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

// Formats a double with 12 significant digits (report convention).
std::string format_sig(double v);

// Exact rational as "num/den" (or plain integer when den == 1).
std::string format_rat(const Rat& r);

std::string format_int(const Int& v);

}  // namespace polyprog
