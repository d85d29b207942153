#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "airydim/ensemble.hpp"
#include "airydim/errors.hpp"
#include "airydim/stats.hpp"
#include "airydim/tail_fit.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace airydim;
using namespace airydim::stats;
using airy::Process;

namespace {

Ensemble small_p2p(std::size_t replicas = 300, int threads = 1) {
  EnsembleSpec s;
  s.mode = lpp::SweepMode::PointToPoint;
  s.N = 250;
  s.offsets = {-20, 120};
  s.master_seed = 11;
  s.replicas = replicas;
  s.threads = threads;
  return run_ensemble(s);
}

Ensemble small_l2p(std::size_t replicas = 300) {
  EnsembleSpec s;
  s.mode = lpp::SweepMode::LineToPoint;
  s.N = 250;
  s.offsets = {-120, 120};
  s.master_seed = 12;
  s.replicas = replicas;
  return run_ensemble(s);
}

}  // namespace

TEST_CASE("tail estimate bookkeeping") {
  const std::vector<double> v{-3, -2, -1, 0, 1, 2, 3, 4};
  const std::vector<double> x{0.0, 1.0, 2.0, 5.0};
  const TailFit up = tail_estimate(v, Side::Upper, x);
  CHECK(up.events == std::vector<std::size_t>{4, 3, 2, 0});
  CHECK(up.p_hat[0] == 0.5);
  CHECK(up.stderr_[0] == doctest::Approx(std::sqrt(0.25 / 8)));
  const TailFit lo = tail_estimate(v, Side::Lower, x, true);
  CHECK(lo.events == std::vector<std::size_t>{4, 3, 2, 0});
  const TailFit lo_strict = tail_estimate(v, Side::Lower, x);
  CHECK(lo_strict.events == std::vector<std::size_t>{3, 2, 1, 0});
  for (double p : up.p_hat) CHECK((p >= 0.0 && p <= 1.0));
}

TEST_CASE("fit recovers the coefficient of an exact stretched-exponential tail") {
  // P(X > x) = exp(-c x^{3/2}) by inversion.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 1.3;
  std::vector<double> v(200000);
  for (double& s : v) s = std::pow(-std::log(1.0 - u(rng)) / c, 2.0 / 3.0);
  std::vector<double> x;
  for (double t = 0.25; t <= 2.5; t += 0.25) x.push_back(t);
  TailFit t = tail_estimate(v, Side::Upper, x);
  fit(t, 1.5);
  CHECK(t.fitted);
  CHECK(t.coefficient == doctest::Approx(c).epsilon(0.02));
  CHECK(t.intercept == doctest::Approx(0.0).epsilon(0.05));
  CHECK(t.ci_lo < c);
  CHECK(t.ci_hi > c);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(t.used_in_fit[i] == (t.events[i] >= kMinEvents));

  const double stable = bootstrap_stability(v, Side::Upper, x, 1.5, 100, 7);
  CHECK(stable >= 0.9);
}

TEST_CASE("fit-impossible cases") {
  const std::vector<double> v{-1, 0.5, 2, 3};
  const std::vector<double> zero{0.0};
  TailFit t = tail_estimate(v, Side::Upper, zero);
  CHECK(t.p_hat[0] == 0.75);
  CHECK_THROWS_AS(fit(t, 1.5), FitImpossibleError);

  const std::vector<double> far{10.0, 20.0};
  TailFit none = tail_estimate(v, Side::Upper, far);
  try {
    fit(none, 1.5);
    FAIL("expected FitImpossibleError");
  } catch (const FitImpossibleError& e) {
    CHECK(std::string(e.what()).find("usable range: none") != std::string::npos);
  }
}

TEST_CASE("band and output schemas") {
  const Band b{4.0 / 3.0};
  CHECK(b.lower() == doctest::Approx(0.65 * 4 / 3));
  CHECK(b.contains(4.0 / 3.0));
  CHECK_FALSE(b.contains(2.0));

  const std::vector<double> v{0, 1, 2, 3};
  const std::vector<double> x{0.5, 1.5};
  TailFit t = tail_estimate(v, Side::Upper, x);
  CHECK(render_tail_csv(t) == "x,p_hat,stderr,used_in_fit\n0.5,0.75,0.21650635094610965,0\n"
                              "1.5,0.5,0.25,0\n");
  const auto j = nlohmann::ordered_json::parse(render_fit_json(t, b));
  CHECK(j["pass"] == false);
  CHECK(j["coefficient"].is_null());
  CHECK(j["band_hi"] == doctest::Approx(1.35 * 4 / 3));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"power", "coefficient", "ci_lo", "ci_hi", "target", "band_lo",
                                         "band_hi", "pass"});
}

TEST_CASE("interval offsets") {
  const auto I = interval_offsets(2000, 0.1, 0.0);
  CHECK(I.first == -12);
  CHECK(I.last == 12);
  const auto one = interval_offsets(2000, 0.0, 0.0);
  CHECK(one.count() == 1);
  const auto shifted = interval_offsets(2000, 0.1, 1.0);
  CHECK(shifted.first == 251 - 12);
}

TEST_CASE("ensembles are deterministic and cacheable") {
  const Ensemble a = small_p2p(40, 1);
  const Ensemble b = small_p2p(40, 3);
  CHECK(a.data() == b.data());
  // Replica r is the stream first_stream + r.
  const auto sweep = lpp::sweep_point_to_point(lpp::WeightOracle(11, 7), 250, {-20, 120});
  for (std::int64_t k = -20; k <= 120; ++k) CHECK(a.passage(7, k) == sweep.at_offset(k));

  const auto dir = std::filesystem::temp_directory_path() / "airydim_cache_test";
  std::filesystem::remove_all(dir);
  const Ensemble c = cached_ensemble(a.spec(), dir);
  const Ensemble d = cached_ensemble(a.spec(), dir);
  CHECK(c.data() == a.data());
  CHECK(d.data() == a.data());
  EnsembleSpec other = a.spec();
  other.master_seed = 99;
  CHECK_FALSE(load_ensemble(std::filesystem::directory_iterator(dir)->path(), other).has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("one-point, running extremes and stride monotonicity") {
  const Ensemble e = small_p2p();
  const auto one = one_point_samples(e, Process::Airy2);
  const auto max_fine = running_extreme_samples(e, Process::Airy2, Side::Upper, 0.0, 1.0, 1);
  const auto max_coarse = running_extreme_samples(e, Process::Airy2, Side::Upper, 0.0, 1.0, 4);
  const auto min_fine = running_extreme_samples(e, Process::Airy2, Side::Lower, 0.0, 1.0, 1);
  const auto min_coarse = running_extreme_samples(e, Process::Airy2, Side::Lower, 0.0, 1.0, 4);
  for (std::size_t r = 0; r < e.replicas(); ++r) {
    CHECK(max_fine[r] >= one[r]);
    CHECK(min_fine[r] <= one[r]);
    CHECK(max_fine[r] >= max_coarse[r]);
    CHECK(min_fine[r] <= min_coarse[r]);
  }
  // Nested intervals: staying below x gets less likely.
  const auto max_half = running_extreme_samples(e, Process::Airy2, Side::Upper, 0.0, 0.5, 1);
  CHECK(stay_probability(max_half, Side::Upper, 0.0) >= stay_probability(max_fine, Side::Upper, 0.0));

  CHECK_THROWS_AS(running_extreme_samples(e, Process::Airy2, Side::Upper, 0.0, 3.0, 1), SizingError);
  CHECK_THROWS_AS(one_point_samples(e, Process::Airy1), ProcessMismatchError);
}

TEST_CASE("covariance and association identities") {
  const Ensemble e = small_l2p();
  const std::vector<double> t{0.0, 0.1, 0.2};
  const CovEstimate c = covariance_airy1(e, t);
  const auto v = one_point_samples(e, Process::Airy1);
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  CHECK(c.cov_hat[0] == doctest::Approx(var).epsilon(1e-10));
  CHECK(c.cov_hat[0] > 0.0);
  for (double se : c.stderr_) CHECK(se > 0.0);
  CHECK(c.diff_stderr.size() == 2);

  const std::vector<std::pair<double, double>> pairs{{0.0, 0.0}, {0.0, 0.05}};
  const std::vector<std::pair<double, double>> thr{{-0.5, -0.5}};
  const AssociationReport a = association_check(e, pairs, thr);
  REQUIRE(a.entries.size() == 2);
  std::size_t below = 0;
  for (double x : v) below += x <= -0.5;
  const double p = static_cast<double>(below) / static_cast<double>(v.size());
  CHECK(a.entries[0].cov == doctest::Approx(p * (1 - p) * v.size() / (v.size() - 1.0)).epsilon(1e-10));
  CHECK_FALSE(a.entries[0].flagged);
}

TEST_CASE("interval minimum and modulus identities") {
  const Ensemble p = small_p2p();
  const auto mins = interval_min_samples(p, 0.2, 0.0);
  for (std::size_t r = 0; r < p.replicas(); ++r) CHECK(mins[r] <= p.airy2(r, 0));
  // A degenerate interval is the one-point value.
  const auto point = interval_min_samples(p, 0.0, 0.0);
  const auto one = one_point_samples(p, Process::Airy2);
  CHECK(point == one);

  const Ensemble l = small_l2p();
  const auto lmins = interval_min_samples(l, 0.2, 0.0);
  for (std::size_t r = 0; r < l.replicas(); ++r) CHECK(lmins[r] <= l.scaled(r, 0));

  const std::vector<double> x{0.0, 0.5, 1.0, 2.0, 4.0, 6.0};
  const ModulusReport mod = modulus_check(p, x, 0.4);
  CHECK(mod.tail.p_hat[0] == 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(mod.tail.p_hat[i] <= mod.tail.p_hat[i - 1]);
  CHECK(mod.bound[0] == 1.0);
  CHECK_THROWS_AS(modulus_samples(p, 2.0), SizingError);
}

TEST_CASE("expectation estimate") {
  const std::vector<std::pair<std::int64_t, std::int64_t>> shapes{{30, 30}, {20, 35}};
  const auto est = expectation_estimate(shapes, 50, 3, 0.5, 2);
  REQUIRE(est.size() == 2);
  CHECK(est[0].mean < 120.0);
  CHECK(est[0].mean > 90.0);
  CHECK(est[0].stderr_ > 0.0);
  const std::vector<std::pair<std::int64_t, std::int64_t>> bad{{10, 40}};
  CHECK_THROWS_AS(expectation_estimate(bad, 10, 3, 0.5), std::invalid_argument);
}
