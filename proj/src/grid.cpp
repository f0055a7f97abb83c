#include "pnmc/grid.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace pnmc {

GridGeometry GridGeometry::from_domain(const ParamDomain& d) {
  d.validate();
  return {d.n_u, d.n_v, d.u_min, d.v_min, d.h_u(), d.h_v()};
}

bool GridGeometry::compatible(const GridGeometry& other, double tol) const {
  return n_u == other.n_u && n_v == other.n_v && std::abs(u0 - other.u0) <= tol &&
         std::abs(v0 - other.v0) <= tol && std::abs(h_u - other.h_u) <= tol &&
         std::abs(h_v - other.h_v) <= tol;
}

GridField GridField::sample(const GridGeometry& g,
                            const std::function<double(double, double)>& f) {
  GridField out(g);
  for (int i = 0; i < g.n_u; ++i)
    for (int j = 0; j < g.n_v; ++j) out.at(i, j) = f(g.u(i), g.v(j));
  return out;
}

namespace {

template <typename Fn>
void for_interior(const GridField& f, int inset, Fn&& fn) {
  for (int i = inset; i < f.geom.n_u - inset; ++i)
    for (int j = inset; j < f.geom.n_v - inset; ++j) fn(f.at(i, j));
}

}  // namespace

double sup_norm(const GridField& f, int inset) {
  double s = 0.0;
  for_interior(f, inset, [&](double x) {
    if (std::isfinite(x)) s = std::max(s, std::abs(x));
  });
  return s;
}

double rms_norm(const GridField& f, int inset) {
  double sum = 0.0;
  long count = 0;
  for_interior(f, inset, [&](double x) {
    if (std::isfinite(x)) {
      sum += x * x;
      ++count;
    }
  });
  return count > 0 ? std::sqrt(sum / count) : 0.0;
}

int invalid_count(const GridField& f, int inset) {
  int c = 0;
  for_interior(f, inset, [&](double x) {
    if (!std::isfinite(x)) ++c;
  });
  return c;
}

GridField d_du(const GridField& f) {
  GridField out(f.geom);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < f.geom.n_u; ++i)
    for (int j = 0; j < f.geom.n_v; ++j) {
      out.at(i, j) = (i == 0 || i == f.geom.n_u - 1)
                         ? nan
                         : (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * f.geom.h_u);
    }
  return out;
}

GridField d_dv(const GridField& f) {
  GridField out(f.geom);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < f.geom.n_u; ++i)
    for (int j = 0; j < f.geom.n_v; ++j) {
      out.at(i, j) = (j == 0 || j == f.geom.n_v - 1)
                         ? nan
                         : (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * f.geom.h_v);
    }
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

namespace {

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw > 0 ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("PNMC_LAB_THREADS")) {
    char* end = nullptr;
    long requested = std::strtol(env, &end, 10);
    if (end != env && requested >= 1) cap = std::min<long>(requested, 64);
  }
  return cap;
}

}  // namespace

void parallel_for(int n, const std::function<void(int)>& f) {
  int workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);  // drain remaining work
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pnmc
