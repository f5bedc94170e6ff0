#include <doctest.h>

#include <cmath>
#include <sstream>

#include "driftstab/closed_loop.hpp"
#include "driftstab/errors.hpp"

using namespace driftstab;

namespace {

SimParams paper_params() {
  SimParams sp;
  sp.plant = PlantParams{2.5, 1.0, 1.0, 0.0};
  sp.quant = snap_gains_to_lattice(2.5, 0.9, 4, 2);
  sp.chan = ChannelParams{0.9, sp.quant.K + 1};
  return sp;
}

}  // namespace

TEST_CASE("loop_step: perfect zoom contracts the estimation error") {
  const SimParams sp = paper_params();
  // granular state, successful reception, no noise
  LoopState st{0.8 * realized_delta(sp.quant, BinSizeIndex{3}),
               BinSizeIndex{3}};
  auto [next, rec] = loop_step(sp, st, 0.0, true, 0);
  CHECK(rec.is_stop);
  CHECK(std::fabs(rec.h) <= 1.0);
  CHECK(std::fabs(rec.x - rec.x_hat) <= 0.5 * rec.delta);
  // |x'| = |a| |x - x_hat| <= |a| delta / 2
  CHECK(std::fabs(next.x) <= 2.5 * 0.5 * rec.delta + 1e-12);
  CHECK(next.delta.idx == 3 - sp.quant.A_exp);
  CHECK(rec.u == -(sp.plant.a / sp.plant.b) * rec.x_hat);
}

TEST_CASE("loop_step: erasure applies zero control and zooms out") {
  const SimParams sp = paper_params();
  LoopState st{1.0, BinSizeIndex{3}};
  auto [next, rec] = loop_step(sp, st, 0.25, false, 7);
  CHECK_FALSE(rec.is_stop);
  CHECK(rec.u == 0.0);
  CHECK(rec.x_hat == 0.0);
  CHECK(next.x == doctest::Approx(2.5 * 1.0 + 0.25).epsilon(1e-15));
  CHECK(next.delta.idx == 3 + sp.quant.B_exp);
}

TEST_CASE("loop_step: received overflow symbol zooms out with u = 0") {
  const SimParams sp = paper_params();
  const double d3 = realized_delta(sp.quant, BinSizeIndex{3});
  LoopState st{3.0 * d3, BinSizeIndex{3}};  // outside the granular region
  auto [next, rec] = loop_step(sp, st, 0.0, true, 0);
  CHECK(rec.symbol == sp.quant.K + 1);
  CHECK(rec.x_hat == 0.0);
  CHECK(rec.u == 0.0);
  CHECK_FALSE(rec.is_stop);
  CHECK(next.delta.idx == 3 + sp.quant.B_exp);
}

TEST_CASE("simulate is deterministic and flags stopping times") {
  const SimParams sp = paper_params();
  const Trajectory t1 = simulate(sp, 5000, RandomStream{42, 0}, sp.quant.L_idx);
  const Trajectory t2 = simulate(sp, 5000, RandomStream{42, 0}, sp.quant.L_idx);
  REQUIRE(t1.records.size() == t2.records.size());
  for (std::size_t i = 0; i < t1.records.size(); ++i) {
    REQUIRE(t1.records[i].x == t2.records[i].x);
    REQUIRE(t1.records[i].delta_idx == t2.records[i].delta_idx);
    REQUIRE(t1.records[i].erasure_ok == t2.records[i].erasure_ok);
  }
  CHECK(t1.stop_times == detect_stopping_times(t1));
  // different stream: different path
  const Trajectory t3 = simulate(sp, 5000, RandomStream{42, 1}, sp.quant.L_idx);
  bool any_diff = false;
  for (std::size_t i = 0; i < t3.records.size(); ++i) {
    any_diff = any_diff || t3.records[i].x != t1.records[i].x;
  }
  CHECK(any_diff);
}

TEST_CASE("detect_stopping_times is the ordered is_stop index set") {
  Trajectory traj;
  for (int i = 0; i < 5; ++i) {
    StepRecord r;
    r.t = i;
    r.is_stop = (i == 0 || i == 3 || i == 4);
    traj.records.push_back(r);
  }
  CHECK(detect_stopping_times(traj) == std::vector<long long>{0, 3, 4});
  traj.records.clear();
  CHECK(detect_stopping_times(traj).empty());
}

TEST_CASE("near-noiseless perfect channel stays near the floor") {
  SimParams sp = paper_params();
  sp.plant.noise_std = 1e-6;
  sp.chan.p = 1.0;
  const Trajectory traj =
      simulate(sp, 2000, RandomStream{7, 0}, sp.quant.L_idx + 5);
  // after the zoom-in transient every step is a stop and delta sits at floor
  for (std::size_t i = 100; i < traj.records.size(); ++i) {
    REQUIRE(traj.records[i].is_stop);
    REQUIRE(traj.records[i].delta_idx <= sp.quant.L_idx);
    REQUIRE(std::fabs(traj.records[i].x) <
            4.0 * realized_delta(sp.quant, BinSizeIndex{sp.quant.L_idx}));
  }
}

TEST_CASE("zoom-out run-length law between stops") {
  const SimParams sp = paper_params();
  const Trajectory traj =
      simulate(sp, 20000, RandomStream{3, 2}, sp.quant.L_idx + 10);
  const auto& stops = traj.stop_times;
  REQUIRE(stops.size() > 100);
  for (std::size_t z = 0; z + 1 < stops.size(); ++z) {
    const long long Tz = stops[z];
    const long long Tnext = stops[z + 1];
    const StepRecord& at_stop = traj.records[static_cast<std::size_t>(Tz)];
    // Delta zooms in once (if above L), then every intermediate step zooms
    // out, so idx(Tz + k) = idx(Tz) - A + (k-1) B along the run.
    const long long idx_after =
        at_stop.delta_idx >= sp.quant.L_idx
            ? at_stop.delta_idx - sp.quant.A_exp
            : at_stop.delta_idx;
    for (long long k = 1; Tz + k <= Tnext; ++k) {
      const StepRecord& rec = traj.records[static_cast<std::size_t>(Tz + k)];
      REQUIRE(rec.delta_idx == idx_after + (k - 1) * sp.quant.B_exp);
    }
  }
}

TEST_CASE("at granular stops the half-bin error bound holds") {
  const SimParams sp = paper_params();
  const Trajectory traj =
      simulate(sp, 20000, RandomStream{5, 0}, sp.quant.L_idx);
  int checked = 0;
  for (const long long t : traj.stop_times) {
    const StepRecord& rec = traj.records[static_cast<std::size_t>(t)];
    if (rec.symbol <= sp.quant.K) {
      REQUIRE(std::fabs(rec.x - rec.x_hat) <= 0.5 * rec.delta);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("numeric escape aborts with the step index") {
  SimParams sp = paper_params();
  sp.plant.a = 4.0;
  sp.quant = snap_gains_to_lattice(4.0, 0.9, 16, 2);
  sp.chan.alphabet_size = 17;
  LoopState st{1.0, BinSizeIndex{sp.quant.L_idx}};
  long long t = 0;
  bool escaped = false;
  try {
    // forced erasures leave the plant open loop: x grows by |a| each step
    for (; t < 4000; ++t) {
      auto [next, rec] = loop_step(sp, st, 0.0, false, t);
      st = next;
    }
  } catch (const NumericEscapeError& e) {
    escaped = true;
    CHECK(e.step() == t);
  }
  CHECK(escaped);
}

TEST_CASE("trajectory CSV schema and round-trip formatting") {
  const SimParams sp = paper_params();
  const Trajectory traj = simulate(sp, 50, RandomStream{1, 0}, sp.quant.L_idx);
  std::ostringstream os;
  write_trajectory_csv(os, traj, "config_hash=deadbeef");
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# config_hash=deadbeef");
  std::getline(is, line);
  CHECK(line == "t,x,delta,h,erasure_ok,symbol,x_hat,u,is_stop");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 50);
}
