#include "polyprog/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace polyprog {

int thread_count() {
  if (const char* env = std::getenv("POLYPROG_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return std::min(n, 256);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(
    std::int64_t n,
    const std::function<void(int chunk, std::int64_t begin, std::int64_t end)>&
        body) {
  if (n <= 0) return;
  // Chunk layout depends only on n so results are thread-count independent.
  const std::int64_t kTargetChunk = 1 << 14;
  int chunks = static_cast<int>(std::min<std::int64_t>(
      256, (n + kTargetChunk - 1) / kTargetChunk));
  chunks = std::max(chunks, 1);
  const std::int64_t step = (n + chunks - 1) / chunks;

  int workers = std::min(thread_count(), chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) {
      std::int64_t b = c * step;
      std::int64_t e = std::min<std::int64_t>(n, b + step);
      if (b < e) body(c, b, e);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int c = w; c < chunks; c += workers) {
        std::int64_t b = c * step;
        std::int64_t e = std::min<std::int64_t>(n, b + step);
        if (b < e) body(c, b, e);
      }
    });
  }
  for (auto& t : pool) t.join();
}

double parallel_sum(std::int64_t n,
                    const std::function<double(std::int64_t)>& term) {
  if (n <= 0) return 0.0;
  const std::int64_t kTargetChunk = 1 << 14;
  int chunks = static_cast<int>(std::min<std::int64_t>(
      256, (n + kTargetChunk - 1) / kTargetChunk));
  chunks = std::max(chunks, 1);
  std::vector<double> partial(static_cast<size_t>(chunks), 0.0);
  parallel_chunks(n, [&](int chunk, std::int64_t b, std::int64_t e) {
    double acc = 0.0;
    for (std::int64_t i = b; i < e; ++i) acc += term(i);
    partial[static_cast<size_t>(chunk)] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;  // fixed order
  return total;
}

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_rat(const Rat& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) {
    os << "/" << boost::multiprecision::denominator(r);
  }
  return os.str();
}

std::string format_int(const Int& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace polyprog
