#include "vhcomp/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

namespace vhcomp {

namespace {

// Incomplete gamma by series, valid and fast for x < nu + 1.
double gamma_series(double nu, double x) {
  double ap = nu;
  double sum = 1.0 / nu;
  double del = sum;
  for (int i = 0; i < 2000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + nu * std::log(x) - std::lgamma(nu));
}

// Upper tail Q(nu, x) by modified Lentz continued fraction, for x >= nu + 1.
double gamma_contfrac(double nu, double x) {
  const double fpmin = 1e-300;
  double b = x + 1.0 - nu;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 2000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - nu);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + nu * std::log(x) - std::lgamma(nu)) * h;
}

} // namespace

double reg_lower_gamma(double nu, double x) {
  if (!(nu > 0.0)) throw std::invalid_argument("reg_lower_gamma: nu must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("reg_lower_gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < nu + 1.0) return gamma_series(nu, x);
  return 1.0 - gamma_contfrac(nu, x);
}

double reg_upper_gamma(double nu, double x) {
  if (!(nu > 0.0)) throw std::invalid_argument("reg_upper_gamma: nu must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("reg_upper_gamma: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (x < nu + 1.0) return 1.0 - gamma_series(nu, x);
  return gamma_contfrac(nu, x);
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct Segment {
  double lo, hi, value, error;
};

struct SegmentWorse {
  bool operator()(const Segment& a, const Segment& b) const {
    return a.error < b.error;
  }
};

Segment gk15(const std::function<double(double)>& f, double lo, double hi) {
  double center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  double fc = f(center);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double dx = half * kXgk[j];
    double fsum = f(center - dx) + f(center + dx);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kron *= half;
  gauss *= half;
  return {lo, hi, kron, std::fabs(kron - gauss)};
}

} // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, double lo,
                        double hi, const QuadratureSpec& spec) {
  if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo))
    throw std::invalid_argument("integrate_1d: bad interval");
  if (lo > hi) throw std::invalid_argument("integrate_1d: lo > hi");
  if (lo == hi) return {0.0, 0.0, 0, true};

  // Map an infinite upper limit onto t in [0, 1) via x = lo + (t/(1-t))^4.
  // The quartic compression keeps the transformed integrand bounded at t = 1
  // for any tail decaying faster than x^(-5/4); the plain rational map blows
  // up there on the slow polynomial tails of the path loss laws.
  std::function<double(double)> g;
  double a = lo, b = hi;
  if (std::isinf(hi)) {
    g = [&f, lo](double t) {
      double om = 1.0 - t;
      if (om < 1e-60) return 0.0; // beyond double range; integrable tails are spent
      double q = t / om;
      double q2 = q * q;
      double jac = 4.0 * q2 * q / (om * om);
      return f(lo + q2 * q2) * jac;
    };
    a = 0.0;
    b = 1.0;
  } else {
    g = f;
  }

  std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> segs;
  Segment whole = gk15(g, a, b);
  segs.push(whole);
  double total = whole.value;
  double toterr = whole.error;
  int splits = 0;
  while (toterr > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)) &&
         splits < spec.max_subdivisions) {
    Segment worst = segs.top();
    segs.pop();
    double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval at floating point resolution; keep its estimate as is.
      segs.push({worst.lo, worst.hi, worst.value, 0.0});
      toterr -= worst.error;
      continue;
    }
    Segment left = gk15(g, worst.lo, mid);
    Segment right = gk15(g, mid, worst.hi);
    total += left.value + right.value - worst.value;
    toterr += left.error + right.error - worst.error;
    segs.push(left);
    segs.push(right);
    ++splits;
  }
  bool ok = toterr <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
  return {total, toterr, splits, ok};
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VHCOMP_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void run_blocked(long trials, int threads,
                 const std::function<void(long, long, long)>& fn) {
  if (trials <= 0) return;
  long nblocks = (trials + kMcBlock - 1) / kMcBlock;
  int workers = static_cast<int>(
      std::min<long>(resolve_thread_count(threads), nblocks));
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      long bidx = next.fetch_add(1);
      if (bidx >= nblocks) return;
      long first = bidx * kMcBlock;
      long last = std::min(trials, first + kMcBlock);
      try {
        fn(bidx, first, last);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

McEstimate blocked_mc_mean(long trials, std::uint64_t seed,
                           std::uint64_t stream_base, int threads,
                           const std::function<double(RngStream&)>& draw) {
  if (trials <= 0) throw std::invalid_argument("blocked_mc_mean: trials must be positive");
  long nblocks = (trials + kMcBlock - 1) / kMcBlock;
  std::vector<double> sums(nblocks, 0.0), sqsums(nblocks, 0.0);
  run_blocked(trials, threads, [&](long b, long first, long last) {
    RngStream rng(seed, stream_base + static_cast<std::uint64_t>(b));
    double s = 0.0, s2 = 0.0;
    for (long i = first; i < last; ++i) {
      double v = draw(rng);
      s += v;
      s2 += v * v;
    }
    sums[b] = s;
    sqsums[b] = s2;
  });
  double s = pairwise_sum(sums);
  double s2 = pairwise_sum(sqsums);
  double n = static_cast<double>(trials);
  double mean = s / n;
  double var = std::max(0.0, s2 / n - mean * mean);
  double se = trials > 1 ? std::sqrt(var / (n - 1.0)) : std::numeric_limits<double>::infinity();
  return {mean, se, trials};
}

McEstimate integrate_ordered_triple_mc(
    const std::function<double(const std::array<double, 3>&)>& g,
    const std::function<std::array<double, 3>(RngStream&)>& sampler,
    long trials, std::uint64_t seed, std::uint64_t stream_base, int threads) {
  return blocked_mc_mean(trials, seed, stream_base, threads,
                         [&](RngStream& rng) { return g(sampler(rng)); });
}

} // namespace vhcomp
