#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrl/function_class.hpp"
#include "mrl/rng.hpp"

using namespace mrl;

namespace {

// phi(x) = x itself (1-d), the simplest norm-bounded map on |x| <= 1.
FeatureClass identity_1d() {
  FeatureClass cls;
  FeatureMap fm;
  fm.id = 0;
  fm.dim_k = 1;
  fm.eval = [](const Input& x) { return std::vector<double>{x[0]}; };
  cls.members.push_back(fm);
  return cls;
}

// phi(x) = 1 everywhere.
FeatureClass constant_1d() {
  FeatureClass cls;
  FeatureMap fm;
  fm.id = 0;
  fm.dim_k = 1;
  fm.eval = [](const Input&) { return std::vector<double>{1.0}; };
  cls.members.push_back(fm);
  return cls;
}

MultiheadFunction make_fn(const FeatureClass& cls, int phi, std::vector<std::vector<double>> heads,
                          double cap = 1.0) {
  MultiheadFunction f;
  f.cls = &cls;
  f.phi_index = phi;
  f.heads = linalg::Mat(heads.size(), heads[0].size());
  for (std::size_t i = 0; i < heads.size(); ++i)
    for (std::size_t j = 0; j < heads[i].size(); ++j) f.heads(i, j) = heads[i][j];
  f.value_cap = cap;
  return f;
}

}  // namespace

TEST_CASE("empirical_sq_distance spec examples") {
  const FeatureClass cls = identity_1d();

  SUBCASE("identical functions give zero") {
    MultitaskHistory h(1);
    h.append(0, {0.7}, 0.0);
    h.append(0, {-0.3}, 0.0);
    const auto f = make_fn(cls, 0, {{0.4}});
    CHECK(empirical_sq_distance(f, f, h) == 0.0);
  }

  SUBCASE("single sample, predictions 0.5 vs 0.2") {
    MultitaskHistory h(1);
    h.append(0, {1.0}, 0.0);
    const auto f = make_fn(cls, 0, {{0.5}});
    const auto g = make_fn(cls, 0, {{0.2}});
    CHECK(empirical_sq_distance(f, g, h) == doctest::Approx(0.09).epsilon(1e-12));
  }

  SUBCASE("two tasks, per-sample differences (0.1,-0.2) and (0.3)") {
    // Head gaps 0.1 and 0.3 on inputs 1 and -2 realize exactly these
    // prediction differences; hand oracle: 0.01 + 0.04 + 0.09 = 0.14.
    MultitaskHistory h(2);
    h.append(0, {1.0}, 0.0);
    h.append(0, {-2.0}, 0.0);
    h.append(1, {1.0}, 0.0);
    const auto f = make_fn(cls, 0, {{0.05}, {0.15}});
    const auto g = make_fn(cls, 0, {{-0.05}, {-0.15}});
    CHECK(empirical_sq_distance(f, g, h) == doctest::Approx(0.14).epsilon(1e-12));
  }

  SUBCASE("task-count mismatch is a dimension error") {
    MultitaskHistory h(2);
    const auto f = make_fn(cls, 0, {{0.1}});
    CHECK_THROWS_AS(empirical_sq_distance(f, f, h), std::invalid_argument);
  }
}

TEST_CASE("empirical_sq_distance is a squared seminorm") {
  const FeatureClass cls = identity_1d();
  rng::Stream s(rng::derive(5, {1}));
  MultitaskHistory h(2);
  for (int task = 0; task < 2; ++task)
    for (int i = 0; i < 6; ++i) h.append(task, {s.uniform(-1.0, 1.0)}, 0.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto f = make_fn(cls, 0, {{s.uniform(-1, 1)}, {s.uniform(-1, 1)}});
    const auto g = make_fn(cls, 0, {{s.uniform(-1, 1)}, {s.uniform(-1, 1)}});
    const auto w = make_fn(cls, 0, {{s.uniform(-1, 1)}, {s.uniform(-1, 1)}});
    const double fg = empirical_sq_distance(f, g, h);
    CHECK(fg == doctest::Approx(empirical_sq_distance(g, f, h)));
    CHECK(fg >= 0.0);
    const double fw = std::sqrt(empirical_sq_distance(f, w, h));
    const double wg = std::sqrt(empirical_sq_distance(w, g, h));
    CHECK(std::sqrt(fg) <= fw + wg + 1e-12);
  }
}

TEST_CASE("cached distance equals direct distance") {
  const FeatureClass cls = identity_1d();
  rng::Stream s(rng::derive(5, {2}));
  MultitaskHistory h(2);
  for (int task = 0; task < 2; ++task)
    for (int i = 0; i < 9; ++i) h.append(task, {s.uniform(-1.0, 1.0)}, s.uniform(-1.0, 1.0));
  DesignCache cache(cls, h);
  const auto f = make_fn(cls, 0, {{0.3}, {-0.8}});
  const auto g = make_fn(cls, 0, {{-0.2}, {0.5}});
  CHECK(empirical_sq_distance(f, g, cache) ==
        doctest::Approx(empirical_sq_distance(f, g, h)).epsilon(1e-13));
}

namespace {

// Two-member class where member 1 carries a nonlinear second coordinate, so
// data generated from it cannot be fit by member 0.
FeatureClass two_member_2d() {
  FeatureClass cls;
  FeatureMap m0;
  m0.id = 0;
  m0.dim_k = 2;
  m0.eval = [](const Input& x) { return std::vector<double>{x[0], x[1]}; };
  FeatureMap m1;
  m1.id = 1;
  m1.dim_k = 2;
  m1.eval = [](const Input& x) { return std::vector<double>{x[1], x[0] * x[1]}; };
  cls.members = {m0, m1};
  return cls;
}

// Independent per-member ridge loss via explicit 2x2 normal equations.
double brute_member_loss(const FeatureClass& cls, int m, const MultitaskHistory& h,
                         double ridge) {
  double total = 0.0;
  for (int task = 0; task < h.num_tasks(); ++task) {
    double g00 = ridge, g01 = 0.0, g11 = ridge, b0 = 0.0, b1 = 0.0;
    for (int i = 0; i < h.len(task); ++i) {
      const auto f = cls.members[m].eval(h.inputs[task][i]);
      g00 += f[0] * f[0];
      g01 += f[0] * f[1];
      g11 += f[1] * f[1];
      b0 += f[0] * h.rewards[task][i];
      b1 += f[1] * h.rewards[task][i];
    }
    const double det = g00 * g11 - g01 * g01;
    const double w0 = (g11 * b0 - g01 * b1) / det;
    const double w1 = (g00 * b1 - g01 * b0) / det;
    for (int i = 0; i < h.len(task); ++i) {
      const auto f = cls.members[m].eval(h.inputs[task][i]);
      const double d = w0 * f[0] + w1 * f[1] - h.rewards[task][i];
      total += d * d;
    }
    total += ridge * (w0 * w0 + w1 * w1);
  }
  return total;
}

}  // namespace

TEST_CASE("erm_fit spec examples") {
  SUBCASE("empty history returns member 0 with zero heads") {
    const FeatureClass cls = two_member_2d();
    MultitaskHistory h(2);
    const MultiheadFunction f = erm_fit(h, cls, 1e-6);
    CHECK(f.phi_index == 0);
    for (int task = 0; task < 2; ++task)
      for (int j = 0; j < 2; ++j) CHECK(f.heads(task, j) == 0.0);
  }

  SUBCASE("noiseless realizable data is interpolated") {
    FeatureClass cls;
    FeatureMap m0;
    m0.id = 0;
    m0.dim_k = 2;
    m0.eval = [](const Input& x) { return std::vector<double>{x[0], x[1]}; };
    cls.members = {m0};
    rng::Stream s(rng::derive(9, {1}));
    MultitaskHistory h(1);
    for (int i = 0; i < 20; ++i) {
      const Input x{s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5)};
      h.append(0, x, 0.8 * x[0] - 0.5 * x[1]);
    }
    const MultiheadFunction f = erm_fit(h, cls, 1e-6);
    double data_loss = 0.0;
    for (int i = 0; i < h.len(0); ++i) {
      const double d = f.predict(0, h.inputs[0][i]) - h.rewards[0][i];
      data_loss += d * d;
    }
    CHECK(data_loss <= 1e-12);
  }

  SUBCASE("noiseless data from member 1 selects member 1") {
    const FeatureClass cls = two_member_2d();
    rng::Stream s(rng::derive(9, {2}));
    MultitaskHistory h(1);
    for (int i = 0; i < 8; ++i) {  // >= 2k inputs in general position
      const Input x{s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5)};
      const auto feats = cls.members[1].eval(x);
      h.append(0, x, 0.8 * feats[0] + 0.6 * feats[1]);
    }
    const MultiheadFunction f = erm_fit(h, cls, 1e-8);
    CHECK(f.phi_index == 1);
    // Brute-force loss comparison across both members agrees.
    CHECK(brute_member_loss(cls, 1, h, 1e-8) < brute_member_loss(cls, 0, h, 1e-8));
  }
}

TEST_CASE("erm_fit minimizes the penalized loss over a candidate grid") {
  const FeatureClass cls = two_member_2d();
  rng::Stream s(rng::derive(9, {3}));
  MultitaskHistory h(2);
  for (int task = 0; task < 2; ++task)
    for (int i = 0; i < 12; ++i)
      h.append(task, Input{s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5)}, s.uniform(-1.0, 1.0));
  const double ridge = 1e-6;
  const MultiheadFunction best = erm_fit(h, cls, ridge);
  const double best_loss = total_ridge_loss(best, h, ridge);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = static_cast<int>(s.below(2));
    const auto cand = make_fn(cls, m,
                              {{s.uniform(-1, 1), s.uniform(-1, 1)},
                               {s.uniform(-1, 1), s.uniform(-1, 1)}},
                              /*cap=*/10.0);
    CHECK(best_loss <= total_ridge_loss(cand, h, ridge) + 1e-9);
  }
}

TEST_CASE("beta_bandit formula values and monotonicity") {
  // Frozen against a 30-digit evaluation of the closed form.
  CHECK(beta_bandit(1, 1, 5, 0.0, 0.0, 1.0) == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(beta_bandit(2, 3, 10, std::log(8.0), 0.0, 0.1) ==
        doctest::Approx(124.58431961608658).epsilon(1e-12));
  CHECK(beta_bandit(1, 1, 100, 0.0, 0.01, 1.0) ==
        doctest::Approx(20.386789137305356).epsilon(1e-12));

  CHECK_THROWS_AS(beta_bandit(1, 1, 1, 0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(beta_bandit(0, 1, 1, 0.0, 0.0, 0.5), std::invalid_argument);

  rng::Stream s(rng::derive(13, {1}));
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 1 + static_cast<int>(s.below(4));
    const int k = 1 + static_cast<int>(s.below(6));
    const int t = 1 + static_cast<int>(s.below(500));
    const double lc = s.uniform(0.0, 5.0);
    const double al = s.uniform(0.0, 0.1);
    const double de = s.uniform(0.05, 1.0);
    const double base = beta_bandit(m, k, t, lc, al, de);
    CHECK(beta_bandit(m + 1, k, t, lc, al, de) >= base);
    CHECK(beta_bandit(m, k + 1, t, lc, al, de) >= base);
    CHECK(beta_bandit(m, k, t + 1, lc, al, de) >= base);
    CHECK(beta_bandit(m, k, t, lc + 0.5, al, de) >= base);
    CHECK(beta_bandit(m, k, t, lc, al, de * 0.5) >= base);
  }
}

TEST_CASE("confidence_contains boundary and monotonicity") {
  const FeatureClass cls = identity_1d();
  MultitaskHistory h(1);
  h.append(0, {1.0}, 0.0);
  const auto center = make_fn(cls, 0, {{0.0}});
  const auto cand = make_fn(cls, 0, {{0.6}});
  const double dist = empirical_sq_distance(cand, center, h);

  ConfidenceSet set{center, dist, &h, &cls, 1e-6};
  CHECK(confidence_contains(center, set));
  CHECK(confidence_contains(cand, set));  // boundary inclusive
  set.beta = dist * 0.999;
  CHECK_FALSE(confidence_contains(cand, set));
  set.beta = dist * 2.0;
  CHECK(confidence_contains(cand, set));  // monotone in beta
}

TEST_CASE("optimistic_select zero-slack returns the center's greedy choice") {
  const FeatureClass cls = identity_1d();
  MultitaskHistory h(1);
  h.append(0, {0.5}, 0.2);
  h.append(0, {-0.5}, -0.2);
  const auto center = make_fn(cls, 0, {{0.4}});
  ConfidenceSet set{center, 0.0, &h, &cls, 1e-8};
  const std::vector<std::vector<Input>> queries = {{{0.9}, {0.1}, {-0.8}}};
  for (const Strategy st : {Strategy::kDecoupled, Strategy::kSweep, Strategy::kExact}) {
    const SelectResult r = optimistic_select(set, queries, st);
    CHECK(r.actions[0] == 0);  // center's greedy action: 0.4 * 0.9 is largest
    CHECK(r.values[0] == doctest::Approx(0.36).epsilon(1e-5));
  }
}

TEST_CASE("optimistic_select one-dimensional bonus matches the interval oracle") {
  const FeatureClass cls = constant_1d();
  const int n = 4;
  MultitaskHistory h(1);
  for (int i = 0; i < n; ++i) h.append(0, {0.0}, 0.3);
  const double ridge = 1e-10;
  const MultiheadFunction center = erm_fit(h, cls, ridge);
  const double beta = 0.4;
  ConfidenceSet set{center, beta, &h, &cls, ridge};
  const SelectResult r = optimistic_select(set, {{{0.0}}}, Strategy::kDecoupled);

  // Independent route: the feasible heads form the interval
  // wbar +- sqrt(slack / G); the linear map w -> q w peaks at an endpoint.
  DesignCache cache(cls, h);
  const PerPhiSolve solve = per_phi_solve(set, cache, 0);
  const double slack = std::max(beta - solve.residual, 0.0);
  const double gram = n + ridge;
  const double wbar = solve.head_fit(0, 0);
  const double hi = wbar + std::sqrt(slack / gram);
  CHECK(r.values[0] == doctest::Approx(hi).epsilon(1e-9));
  CHECK(r.values[0] == doctest::Approx(0.3 + std::sqrt(beta / n)).epsilon(1e-4));
}

TEST_CASE("optimistic_select validates inputs") {
  const FeatureClass cls = identity_1d();
  MultitaskHistory h(1);
  const auto center = make_fn(cls, 0, {{0.0}});
  ConfidenceSet set{center, -1.0, &h, &cls, 1e-6};
  CHECK_THROWS_AS(optimistic_select(set, {{{0.5}}}, Strategy::kDecoupled),
                  std::invalid_argument);
  set.beta = 1.0;
  CHECK_THROWS_AS(optimistic_select(set, {{}}, Strategy::kDecoupled), std::invalid_argument);
}

namespace {

// Random small multi-member instance on 2-d identity-style features. Filled
// in place: the confidence set points back into this object.
struct RandomInstance {
  FeatureClass cls;
  MultitaskHistory history;
  MultiheadFunction center;
  ConfidenceSet set;
  std::vector<std::vector<Input>> queries;

  void fill(rng::Stream& s, int num_tasks, int num_actions, double beta, double cap) {
    FeatureMap m0;
    m0.id = 0;
    m0.dim_k = 2;
    m0.eval = [](const Input& x) { return std::vector<double>{x[0], x[1]}; };
    FeatureMap m1;
    m1.id = 1;
    m1.dim_k = 2;
    m1.eval = [](const Input& x) { return std::vector<double>{0.5 * (x[0] + x[1]), x[1]}; };
    cls.members = {m0, m1};

    history = MultitaskHistory(num_tasks);
    for (int task = 0; task < num_tasks; ++task) {
      const int n = 2 + static_cast<int>(s.below(4));
      for (int i = 0; i < n; ++i)
        history.append(task, Input{s.uniform(-0.7, 0.7), s.uniform(-0.7, 0.7)},
                       s.uniform(-0.5, 0.5));
    }
    center = erm_fit(history, cls, 1e-6, cap);
    set = ConfidenceSet{center, beta, &history, &cls, 1e-6};
    queries.assign(num_tasks, {});
    for (int task = 0; task < num_tasks; ++task)
      for (int a = 0; a < num_actions; ++a)
        queries[task].push_back(Input{s.uniform(-0.7, 0.7), s.uniform(-0.7, 0.7)});
  }
};

}  // namespace

TEST_CASE("strategy sandwich: sweep <= exact <= decoupled") {
  rng::Stream s(rng::derive(21, {4}));
  for (int rep = 0; rep < 60; ++rep) {
    const int m = 1 + static_cast<int>(s.below(3));
    const int a = 2 + static_cast<int>(s.below(3));
    const double beta = s.uniform(0.0, 2.0);
    const double cap = s.below(2) ? 1.0 : 0.4;  // exercise the clamp too
    RandomInstance inst;
    inst.fill(s, m, a, beta, cap);
    const double sweep =
        optimistic_select(inst.set, inst.queries, Strategy::kSweep).total_value;
    const double exact =
        optimistic_select(inst.set, inst.queries, Strategy::kExact).total_value;
    const double dec =
        optimistic_select(inst.set, inst.queries, Strategy::kDecoupled).total_value;
    CHECK(sweep <= exact + 1e-9);
    CHECK(exact <= dec + 1e-9);
  }
}

TEST_CASE("width spec examples") {
  SUBCASE("zero beta on a singleton class gives zero width") {
    const FeatureClass cls = constant_1d();
    MultitaskHistory h(1);
    h.append(0, {0.0}, 0.1);
    const MultiheadFunction center = erm_fit(h, cls, 1e-8);
    ConfidenceSet set{center, 0.0, &h, &cls, 1e-8};
    CHECK(width(set, {{0.0}}) == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("width is nondecreasing in beta") {
    rng::Stream s(rng::derive(21, {5}));
    RandomInstance inst;
    inst.fill(s, 2, 2, 1.0, 1.0);
    const std::vector<Input> pts = {inst.queries[0][0], inst.queries[1][0]};
    const double w1 = width(inst.set, pts);
    inst.set.beta = 4.0;
    const double w4 = width(inst.set, pts);
    CHECK(w1 <= w4 + 1e-12);
  }

  SUBCASE("single constant feature: width is 2 sqrt(beta/n)") {
    const FeatureClass cls = constant_1d();
    const int n = 9;
    MultitaskHistory h(1);
    for (int i = 0; i < n; ++i) h.append(0, {0.0}, 0.2);
    const double ridge = 1e-10;
    const MultiheadFunction center = erm_fit(h, cls, ridge);
    const double beta = 0.09;
    ConfidenceSet set{center, beta, &h, &cls, ridge};
    // Grid-search oracle over feasible heads: evaluate the prediction gap at
    // both interval endpoints.
    DesignCache cache(cls, h);
    const PerPhiSolve solve = per_phi_solve(set, cache, 0);
    const double slack = std::max(beta - solve.residual, 0.0);
    const double half = std::sqrt(slack / (n + ridge));
    CHECK(width(set, {{0.0}}) == doctest::Approx(2 * half).epsilon(1e-9));
    CHECK(width(set, {{0.0}}) == doctest::Approx(2 * std::sqrt(beta / n)).epsilon(1e-4));
  }
}

TEST_CASE("optimism under containment") {
  // Whenever the truth sits inside the set, the selected tuple's optimistic
  // value dominates the truth's optimal value.
  rng::Stream s(rng::derive(21, {6}));
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 1 + static_cast<int>(s.below(3));
    RandomInstance inst;
    inst.fill(s, m, 3, 0.0, 1.0);
    const auto truth = make_fn(inst.cls, static_cast<int>(s.below(2)),
                               [&] {
                                 std::vector<std::vector<double>> hh;
                                 for (int i = 0; i < m; ++i)
                                   hh.push_back({s.uniform(-0.7, 0.7), s.uniform(-0.7, 0.7)});
                                 return hh;
                               }());
    inst.set.beta = empirical_sq_distance(truth, inst.center, inst.history) * 1.0000001 + 1e-12;
    REQUIRE(confidence_contains(truth, inst.set));
    double truth_best = 0.0;
    for (int task = 0; task < m; ++task) {
      double best = -2.0;
      for (const Input& x : inst.queries[task]) best = std::max(best, truth.predict(task, x));
      truth_best += best;
    }
    for (const Strategy st : {Strategy::kDecoupled, Strategy::kExact}) {
      const SelectResult r = optimistic_select(inst.set, inst.queries, st);
      CHECK(r.total_value >= truth_best - 1e-5);
    }
  }
}
