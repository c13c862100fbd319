// Compares the OpenMP kernels against their serial reference
// implementations: the boundary sweep (parallel across weights) and the
// Monte Carlo decoder trials (parallel across trials). Results must match
// exactly; timings show the speedup on the current machine.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "bdbc/io.hpp"
#include "bdbc/region.hpp"
#include "bdbc/sim.hpp"
#include "bdbc/threading.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bdbc::BidirectionalChannel fig2_channel() {
  using bdbc::Complex;
  bdbc::CMatrix h1(2, 2), h2(2, 2);
  h1 << Complex(1.0, -0.5), Complex(1.0, -0.5), Complex(-0.5, 0.0), Complex(1.3, 0.0);
  h2 << Complex(1.2, -0.2), Complex(0.7, 0.0), Complex(1.0, 0.0), Complex(0.0, -0.2);
  return bdbc::BidirectionalChannel(h1, h2, 1.0, 1.0);
}

}  // namespace

int main() {
  const bdbc::BidirectionalChannel ch = fig2_channel();
  std::printf("workers: %d (set BDBC_THREADS to cap)\n\n", bdbc::worker_threads());

  {
    const int n_weights = 101;
    auto t0 = Clock::now();
    const bdbc::CapacityBoundary serial = bdbc::sweep_boundary_serial(ch, n_weights);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const bdbc::CapacityBoundary parallel = bdbc::sweep_boundary(ch, n_weights);
    const double tp = seconds_since(t0);

    bool equal = serial.points.size() == parallel.points.size();
    for (std::size_t i = 0; equal && i < serial.points.size(); ++i)
      equal = serial.points[i].rates.r1 == parallel.points[i].rates.r1 &&
              serial.points[i].rates.r2 == parallel.points[i].rates.r2;
    std::printf("sweep_boundary      %d weights : serial %.3fs  omp %.3fs  speedup %.2fx  %s\n",
                n_weights, ts, tp, ts / tp, equal ? "results equal" : "MISMATCH");
  }

  const bdbc::CovarianceMatrix q = bdbc::waterfill_single_user(ch, 1).q_opt;
  const auto trial_row = [&](const char* label, bdbc::CodeConfig cc, long trials) {
    auto t0 = Clock::now();
    const bdbc::TrialStats serial = bdbc::run_trials_serial(ch, q, cc, trials);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const bdbc::TrialStats parallel = bdbc::run_trials(ch, q, cc, trials);
    const double tp = seconds_since(t0);
    std::printf("%-28s %ld trials : serial %.3fs  omp %.3fs  speedup %.2fx  %s\n",
                label, trials, ts, tp, ts / tp,
                serial == parallel ? "results equal" : "MISMATCH");
  };

  bdbc::CodeConfig fixed;
  fixed.block_length = 48;
  fixed.m1 = fixed.m2 = 64;
  fixed.epsilon_p = 0.05;
  fixed.seed = 7;
  fixed.fresh_codebook = false;  // one materialized book vs streamed candidates
  trial_row("run_trials (fixed book)", fixed, 400);

  bdbc::CodeConfig fresh = fixed;
  fresh.m1 = fresh.m2 = 16;  // the reference rebuilds m1*m2 blocks per trial
  fresh.fresh_codebook = true;
  trial_row("run_trials (fresh books)", fresh, 400);
  return 0;
}
