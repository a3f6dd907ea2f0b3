// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned here.
// Lines tagged "supplementary" report extra evidence and do not gate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfbell/local_polytope.hpp"
#include "cfbell/reference.hpp"
#include "cfbell/workbench.hpp"

using namespace cfbell;
using std::numbers::pi;

namespace {

const double kRootEight = 2 * std::sqrt(2.0);

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << (ok ? "" : "!") << what;
  }
};

int failures = 0;

void criterion(const std::string& id, const std::string& label, double limit_seconds,
               const std::function<void(Verdict&)>& body, bool gating = true) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (seconds > limit_seconds) v.require(false, "time limit " + std::to_string(limit_seconds) + " s exceeded");
  if (gating && !v.pass) ++failures;
  std::printf("%s %-4s %-44s %7.2f s  %s%s\n", v.pass ? "PASS" : "FAIL", id.c_str(), label.c_str(), seconds,
              v.detail.str().c_str(), gating ? "" : "  [supplementary]");
  std::fflush(stdout);
}

std::string fmt(double x, int digits = 7) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  return buf;
}

BellExpression multipartite(int n, int d) { return bell_expression(Scenario(n, d), ExpressionFamily::multipartite); }

OptimizerConfig starts(std::size_t k) {
  OptimizerConfig c;
  c.starts = k;
  return c;
}

PhaseConfiguration qubit_phases() {
  return PhaseConfiguration(Scenario(3, 2), {{{0, -pi / 12}, {0, pi / 4}}, {{0, -pi / 6}, {0, pi / 3}}, {{0, 0}, {0, pi / 6}}});
}

StateVector relevance_state() {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = 0.169414;
  v(4) = 0.0461131;
  v(5) = 0.161369;
  v(6) = 0.193624;
  v(7) = 0.951652;
  return StateVector(Scenario(3, 2), v);
}

double timed(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  criterion("1", "classical bound", 600, [](Verdict& v) {
    for (int d = 2; d <= 10; ++d) {
      std::optional<ClassicalMaximum> r;
      const double s = timed([&] { r = classical_maximum(multipartite(3, d)); });
      const bool ok = r->maximum == Rational(2) && (d < 10 || s < 120);
      v.require(ok, "N=3 d=" + std::to_string(d) + " max " + to_string(r->maximum) + (d == 10 ? " in " + fmt(s, 2) + " s" : ""));
    }
    for (auto [n, d] : std::vector<std::pair<int, int>>{{4, 2}, {4, 3}, {5, 2}}) {
      std::optional<ClassicalMaximum> r;
      const double s = timed([&] { r = classical_maximum(multipartite(n, d)); });
      v.require(r->maximum == Rational(2) && s < 60,
                "N=" + std::to_string(n) + " d=" + std::to_string(d) + " max " + to_string(r->maximum));
    }
  });

  criterion("2", "value spectrum N=3 d=2", 60, [](Verdict& v) {
    const auto r = classical_maximum(multipartite(3, 2));
    std::string support;
    for (const auto& [value, count] : r.histogram) support += to_string(value) + " ";
    v.require(r.histogram.size() == 2 && r.histogram.count(Rational(-2)) && r.histogram.count(Rational(2)),
              "support { " + support + "}");
  });

  criterion("3", "tightness (facet, affine rank D-1)", 840, [](Verdict& v) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {3, 3}, {3, 4}, {3, 5}, {4, 2}, {4, 3}, {5, 2}}) {
      FacetReport r{Scenario(n, d), ExpressionFamily::multipartite};
      const double s = timed([&] { r = facet_check(multipartite(n, d)); });
      v.require(r.is_facet && r.affine_rank == r.dimension - 1 && s < 120,
                "(" + std::to_string(n) + "," + std::to_string(d) + ") rank " + std::to_string(r.affine_rank) + "/" +
                    std::to_string(r.dimension - 1));
    }
  });

  criterion("4", "CHSH facet oracle", 1, [](Verdict& v) {
    const auto r = facet_check(bell_expression(Scenario(2, 2), ExpressionFamily::bipartite_legacy));
    v.require(r.classical_max == Rational(2), "max " + to_string(r.classical_max));
    v.require(r.is_facet && r.dimension == 8 && r.affine_rank == 7,
              "D=" + std::to_string(r.dimension) + " rank " + std::to_string(r.affine_rank));
  });

  criterion("5", "3-qubit violation", 10, [](Verdict& v) {
    const double at_published = quantum_bell_value(ghz_qubit(pi / 4), qubit_phases(), multipartite(3, 2));
    v.require(std::abs(at_published - kRootEight) <= 1e-3, "published phases " + fmt(at_published));
    const auto r = optimize_phases(ghz_qubit(pi / 4), multipartite(3, 2));
    v.require(r.best_value >= 2.828427 - 1e-4, "optimized " + fmt(r.best_value));
  });

  criterion("6", "3-qutrit violations", 120, [](Verdict& v) {
    const auto s = seesaw(multipartite(3, 3));
    v.require(std::abs(s.best_value - 2.915) <= 2e-3, "seesaw " + fmt(s.best_value));
    const auto m = optimize_phases(ghz_qutrit(std::acos(1 / std::sqrt(3.0)), pi / 4), multipartite(3, 3));
    v.require(std::abs(m.best_value - 2.873) <= 2e-3, "max-entangled " + fmt(m.best_value));
    v.require(m.best_value < s.best_value, "max-entangled below see-saw");
  });

  criterion("7", "4- and 5-qubit violations", 120, [](Verdict& v) {
    for (int n : {4, 5}) {
      const auto r = seesaw(multipartite(n, 2));
      v.require(std::abs(r.best_value - 2.828427) <= 1e-3 && r.best_value <= 2.828427 + 1e-3,
                "N=" + std::to_string(n) + " " + fmt(r.best_value));
    }
  });

  criterion("8", "noise thresholds", 1, [](Verdict& v) {
    const double f = noise_threshold(kRootEight);
    v.require(std::abs(f - 0.292893) <= 1e-5, "F(2rt2) " + fmt(f));
    const double g = noise_threshold(4.0);
    v.require(std::abs(g - 0.5) <= 1e-12, "F(4) " + fmt(g, 12));
    const auto expr = multipartite(3, 2);
    const auto table = joint_probabilities(ghz_qubit(pi / 4), qubit_phases());
    const double fthr = noise_threshold(bell_value(expr, table));
    const double crossing = bell_value(expr, mix(table, uniform_table(Scenario(3, 2)), fthr));
    v.require(std::abs(crossing - 2.0) <= 1e-8, "mixed table at F_thr " + fmt(crossing, 10));
  });

  criterion("9", "relevance state", 60, [](Verdict& v) {
    const auto r = optimize_phases(relevance_state(), multipartite(3, 2), starts(256));
    v.require(r.best_value >= 2.0028, "beamsplitter optimum " + fmt(r.best_value));
    const auto m = mermin3_max(relevance_state(), starts(256));
    v.require(m.best_value <= 2 + 1e-4, "Mermin " + fmt(m.best_value));
  });

  criterion("9b", "relevance state, general qubit observables", 60, [](Verdict& v) {
    auto c = starts(256);
    c.measurements = MeasurementClass::qubit_bloch;
    const auto r = optimize_phases(relevance_state(), multipartite(3, 2), c);
    v.require(r.best_value >= 2.0028, "qubit optimum " + fmt(r.best_value));
  }, false);

  criterion("10", "non-violation window", 120, [](Verdict& v) {
    for (auto [theta, name] : std::vector<std::pair<double, std::string>>{{pi / 16, "pi/16"}, {pi / 8, "pi/8"}}) {
      const auto r = optimize_phases(ghz_qubit(theta), multipartite(3, 2), starts(256));
      v.require(r.best_value <= 2 + 1e-3, name + " " + fmt(r.best_value));
    }
    const auto r = optimize_phases(ghz_qubit(pi / 6), multipartite(3, 2), starts(256));
    v.require(r.best_value > 2.01, "pi/6 " + fmt(r.best_value));
  });

  criterion("11", "W states", 120, [](Verdict& v) {
    const auto r = optimize_state_family(StateFamily::w_state, multipartite(3, 2));
    v.require(std::abs(r.best_value - 2.828427) <= 1e-2, "beamsplitter optimum " + fmt(r.best_value));
  });

  criterion("11b", "W states, general qubit observables", 120, [](Verdict& v) {
    auto c = starts(64);
    c.measurements = MeasurementClass::qubit_bloch;
    const auto r = optimize_state_family(StateFamily::w_state, multipartite(3, 2), c);
    v.require(std::abs(r.best_value - 2.828427) <= 1e-2, "qubit optimum " + fmt(r.best_value));
  }, false);

  criterion("12", "reduction / CGLMP consistency", 60, [](Verdict& v) {
    const auto two = seesaw(reduce_to_bipartite(multipartite(3, 2)));
    v.require(std::abs(two.best_value - 2.828427) <= 1e-4, "d=2 " + fmt(two.best_value));
    const auto three = seesaw(reduce_to_bipartite(multipartite(3, 3)));
    v.require(std::abs(three.best_value - 2.9149) <= 1e-3, "d=3 " + fmt(three.best_value));
  });

  criterion("13", "property suites", 600, [](Verdict& v) {
    bool uniform = true;
    for (int n = 2; n <= 5; ++n)
      for (int d = 2; d <= 7; ++d) {
        const Scenario sc(n, d);
        const auto t = exact_uniform_table(sc);
        for (std::size_t s = 0; s < sc.settings_tuples(); ++s) uniform = uniform && correlation(t, sc.settings_at(s)) == Rational(0);
      }
    v.require(uniform, "uniform correlation exactly 0 (N<=5, d<=7)");

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(-pi, pi);
    auto random_state = [&](const Scenario& sc) {
      ComplexVector a(static_cast<Eigen::Index>(sc.outcome_tuples()));
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(g(rng), g(rng));
      return StateVector(sc, a / a.norm());
    };
    auto random_config = [&](const Scenario& sc) {
      std::vector<double> free(PhaseConfiguration::zeros(sc).free_count());
      for (auto& x : free) x = u(rng);
      return PhaseConfiguration::from_free(sc, free);
    };
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
      const Scenario sc(2 + k % 3, 2 + (k / 3) % 3);
      const auto t = joint_probabilities(random_state(sc), random_config(sc));
      for (std::size_t s = 0; s < sc.settings_tuples(); ++s) {
        double sum = 0;
        for (double p : t.block(s)) sum += p;
        worst = std::max(worst, std::abs(sum - 1));
      }
    }
    v.require(worst <= 1e-10, "1000 tables normalized, worst " + sci(worst));

    double rayleigh = 0;
    const auto expr = multipartite(3, 2);
    const auto op = bell_operator(random_config(Scenario(3, 2)), expr);
    for (int k = 0; k < 100; ++k) {
      const auto psi = random_state(Scenario(3, 2));
      rayleigh = std::max(rayleigh, std::abs(op.expectation(psi) - quantum_bell_value(psi, op.measurements(), expr)));
    }
    v.require(rayleigh <= 1e-10, "Rayleigh gap " + sci(rayleigh));

    bool monotone = true;
    for (int d : {2, 3}) {
      const auto r = seesaw(multipartite(3, d), starts(8));
      for (std::size_t k = 1; k < r.trace.size(); ++k) monotone = monotone && r.trace[k] >= r.trace[k - 1] - 1e-12;
    }
    v.require(monotone, "see-saw monotone");

    bool identical = true;
    const std::vector<std::vector<std::string>> runs = {
        {"facet", "--d", "3"},
        {"optimize", "--state", "ghz_qubit:0.6", "--starts", "8", "--seed", "5"},
        {"sweep", "--state", "ghz_qubit", "--grid", "0.2;0.5;0.7", "--starts", "4", "--format", "csv"},
        {"seesaw", "--d", "3", "--starts", "2"}};
    for (auto args : runs) {
      args.push_back("--no-timestamp");
      const auto a = run(parse_runspec(args)).body;
      const auto b = run(parse_runspec(args)).body;
      args.insert(args.end(), {"--threads", "4"});
      const auto c = run(parse_runspec(args)).body;
      identical = identical && a == b && a == c;
    }
    v.require(identical, "byte-identical reports (repeat, --threads 4)");
  });

  std::printf("%s: %d gating criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
