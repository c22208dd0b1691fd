#include <doctest.h>

#include <airsea/conic/model.hpp>
#include <airsea/conic/program.hpp>
#include <airsea/conic/rank1.hpp>
#include <airsea/conic/sca.hpp>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

using namespace airsea::conic;

TEST_CASE("one-dimensional LP") {
  Model m;
  const int x = m.add_var();
  m.add_objective(m.var(x));
  m.add_nonneg(m.var(x) - 3.0);
  const Solution s = solve_conic(m.program());
  CHECK(s.status == Status::optimal);
  CHECK(s.x[x] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.max_violation <= 1e-6);
}

TEST_CASE("infeasible LP is certified by phase one") {
  Model m;
  const int x = m.add_var();
  m.add_objective(m.var(x));
  m.add_nonneg(m.var(x) - 3.0);
  m.add_le(m.var(x), 2.0);
  CHECK(solve_conic(m.program()).status == Status::infeasible);

  // The elastic relaxation is feasible and reports the needed slack.
  const ConicProgram relaxed = elastic(m.program(), 100.0);
  const Solution s = solve_conic(relaxed);
  CHECK(s.status == Status::optimal);
  CHECK(s.x[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("diagonal SDP") {
  // X = [[a, b], [b, c]] PSD, minimize a + c subject to a >= 2.
  Model m;
  const auto v = m.add_vars(3);
  PsdBlock blk;
  blk.constant = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d Fa, Fb, Fc;
  Fa << 1, 0, 0, 0;
  Fb << 0, 1, 1, 0;
  Fc << 0, 0, 0, 1;
  blk.terms = {{v[0], Fa}, {v[1], Fb}, {v[2], Fc}};
  m.add_psd(blk);
  m.add_nonneg(m.var(v[0]) - 2.0);
  m.add_objective(m.var(v[0]) + m.var(v[2]));
  const Solution s = solve_conic(m.program());
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-7));
  Eigen::Matrix2d X;
  X << s.x[0], s.x[1], s.x[1], s.x[2];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(X);
  CHECK(es.eigenvalues()[0] < 1e-6 * es.eigenvalues()[1]);
}

TEST_CASE("Hermitian PSD variable: minimum trace with a gain constraint") {
  const Eigen::Vector3cd a(std::complex<double>(1, 0), std::complex<double>(0, 2), std::complex<double>(-1, 1));
  Model m;
  const HermitianVar X = add_hermitian_psd(m, 3, Eigen::MatrixXcd::Zero(3, 3));
  m.add_objective(trace_product(X, Eigen::MatrixXcd::Identity(3, 3)));
  m.add_nonneg(trace_product(X, a * a.adjoint()) - 1.0);
  const Solution s = solve_conic(m.program());
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(1.0 / a.squaredNorm()).epsilon(1e-7));
  const Rank1 r = extract_rank1(hermitian_value(X, s.x));
  CHECK(r.residual < 1e-6);
  CHECK(std::norm(a.dot(r.vector)) == doctest::Approx(1.0).epsilon(1e-6));
}

namespace {

// Dual projected-gradient oracle for  min c^T x  s.t. |x - a_i| <= r_i.
// g(l) = min_x c^T x + sum l_i (|x - a_i|^2 - r_i^2) has the closed-form
// minimizer x = (sum l_i a_i - c/2) / sum l_i.
double ball_oracle(const Eigen::VectorXd& c, const std::vector<Eigen::VectorXd>& a, const std::vector<double>& r) {
  const int m = int(a.size());
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(m, 1.0);
  auto primal = [&](const Eigen::VectorXd& l) {
    Eigen::VectorXd num = -0.5 * c;
    for (int i = 0; i < m; ++i) num += l[i] * a[i];
    return Eigen::VectorXd(num / l.sum());
  };
  auto dual = [&](const Eigen::VectorXd& l) {
    const Eigen::VectorXd x = primal(l);
    double g = c.dot(x);
    for (int i = 0; i < m; ++i) g += l[i] * ((x - a[i]).squaredNorm() - r[i] * r[i]);
    return g;
  };
  double step = 1e-3;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd x = primal(lam);
    Eigen::VectorXd grad(m);
    for (int i = 0; i < m; ++i) grad[i] = (x - a[i]).squaredNorm() - r[i] * r[i];
    const double g0 = dual(lam);
    for (;;) {
      Eigen::VectorXd next = (lam + step * grad).cwiseMax(1e-12);
      const double g1 = dual(next);
      if (g1 >= g0 + 0.5 * grad.dot(next - lam) || step < 1e-16) {
        if ((next - lam).norm() < 1e-15 * (1 + lam.norm())) return g1;
        lam = next;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
  }
  return dual(lam);
}

}  // namespace

TEST_CASE("random strictly feasible SOCPs agree with a first-order dual oracle") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nrm;
  std::uniform_int_distribution<int> dim(2, 20), cnt(2, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = dim(rng), m = cnt(rng);
    Eigen::VectorXd center(n), c(n);
    for (int i = 0; i < n; ++i) {
      center[i] = nrm(rng);
      c[i] = nrm(rng);
    }
    std::vector<Eigen::VectorXd> a;
    std::vector<double> r;
    Model mod;
    const auto x = mod.add_vars(n);
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXd ak(n);
      for (int i = 0; i < n; ++i) ak[i] = center[i] + nrm(rng);
      a.push_back(ak);
      r.push_back((ak - center).norm() + 0.5 + std::abs(nrm(rng)));
      std::vector<Affine> rows;
      for (int i = 0; i < n; ++i) rows.push_back(mod.var(x[i]) - ak[i]);
      mod.add_soc(rows, r.back());
    }
    Affine obj;
    for (int i = 0; i < n; ++i) obj += c[i] * mod.var(x[i]);
    mod.add_objective(obj);
    const Solution s = solve_conic(mod.program(), {1e-10});
    REQUIRE(s.status == Status::optimal);
    CHECK(s.max_violation <= 1e-6);
    const double oracle = ball_oracle(c, a, r);
    CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-5));
  }
}

TEST_CASE("power gadgets") {
  Model m;
  const int x = m.add_var(1.0), y = m.add_var(2.0);
  m.add_nonneg(m.var(x) - 3.0);
  m.add_le(m.var(y), 2.0);
  const int sq = m.square_over(m.var(x), m.var(y), 10.0);
  const int cu = m.cube_over_square(m.var(x), m.var(y), 10.0);
  m.add_objective(m.var(sq) + m.var(cu));
  const Solution s = solve_conic(m.program());
  REQUIRE(s.status == Status::optimal);
  CHECK(s.x[sq] == doctest::Approx(9.0 / 2.0).epsilon(1e-6));
  CHECK(s.x[cu] == doctest::Approx(27.0 / 4.0).epsilon(1e-6));
}

TEST_CASE("hover-slot-sized SDP solves quickly") {
  // Nine Hermitian 4x4 variables, eleven linear constraints.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nrm;
  auto rvec = [&] {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v[i] = {nrm(rng), nrm(rng)};
    return v;
  };
  Model m;
  std::vector<HermitianVar> X;
  Affine power;
  for (int k = 0; k < 9; ++k) {
    X.push_back(add_hermitian_psd(m, 4, Eigen::MatrixXcd::Zero(4, 4)));
    power += trace_product(X.back(), Eigen::MatrixXcd::Identity(4, 4));
  }
  for (int k = 0; k < 9; ++k) {
    const Eigen::VectorXcd h = rvec();
    Affine c = trace_product(X[k], h * h.adjoint());
    for (int j = 0; j < 9; ++j)
      if (j != k) c -= 0.01 * trace_product(X[j], h * h.adjoint());
    m.add_nonneg(c - 0.1);
  }
  m.add_le(power, 100.0);
  m.add_objective(power);
  const auto t0 = std::chrono::steady_clock::now();
  const Solution s = solve_conic(m.program());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s.status == Status::optimal);
  CHECK(secs < 1.0);
}

TEST_CASE("dump lists every block") {
  Model m;
  const int x = m.add_var();
  m.add_objective(m.var(x));
  m.add_nonneg(m.var(x));
  m.add_soc({m.var(x)}, 2.0);
  std::ostringstream os;
  dump(m.program(), os);
  CHECK(os.str().find("lin") != std::string::npos);
  CHECK(os.str().find("soc") != std::string::npos);
}

TEST_CASE("malformed programs are rejected") {
  ConicProgram p;
  p.num_vars = 2;
  p.objective = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(solve_conic(p), std::invalid_argument);
  p.objective = Eigen::VectorXd::Zero(2);
  p.linear.push_back(Affine::variable(5));
  CHECK_THROWS_AS(solve_conic(p), std::invalid_argument);
}

TEST_CASE("rank-one extraction") {
  Eigen::VectorXcd w(3);
  w << std::complex<double>(1, 2), std::complex<double>(-0.5, 0), std::complex<double>(0, 1);
  Rank1 r = extract_rank1(w * w.adjoint());
  CHECK(r.residual < 1e-12);
  CHECK_FALSE(r.randomized);
  // Equal up to a global phase.
  const std::complex<double> phase = w.dot(r.vector) / std::abs(w.dot(r.vector));
  CHECK((r.vector - w * phase).norm() < 1e-10);

  r = extract_rank1(Eigen::MatrixXcd::Identity(2, 2));
  CHECK(r.residual == doctest::Approx(0.5));
  CHECK(r.randomized);
  CHECK(r.vector.squaredNorm() == doctest::Approx(2.0));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> nrm;
  Eigen::VectorXcd v(4);
  for (int i = 0; i < 4; ++i) v[i] = {nrm(rng), nrm(rng)};
  Eigen::MatrixXcd noise(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) noise(i, j) = {nrm(rng), nrm(rng)};
  noise = 1e-8 * (noise * noise.adjoint());
  CHECK(extract_rank1(v * v.adjoint() + noise).residual < 1e-6);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS(extract_rank1(bad));
}

TEST_CASE("SCA loop") {
  SUBCASE("convex problem: the first surrogate solve lands on the optimum") {
    // min (x-2)^2 written with an epigraph, surrogate identical to the problem.
    ScaProblem p;
    p.build = [](const Eigen::VectorXd& x0) {
      Model m;
      const int x = m.add_var(x0[0]);
      const int e = m.square_over(m.var(x) - 2.0, 1.0, std::pow(x0[0] - 2.0, 2) + 1.0);
      m.add_objective(m.var(e));
      ConicProgram prog = m.program();
      return prog;
    };
    p.objective = [](const Eigen::VectorXd& x) { return std::pow(x[0] - 2.0, 2); };
    // Iterate lives in (x, e); objective reads x only.
    const ScaState st = sca_loop(p, Eigen::Vector2d(10.0, 65.0));
    CHECK(st.history[1] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(st.iterations <= 2);
    CHECK(st.converged);
  }
  SUBCASE("history never increases") {
    // min x^2 + 4 cos(x), handled by majorizing cos with its tangent plus curvature bound.
    auto f = [](const Eigen::VectorXd& x) { return x[0] * x[0] + 4.0 * std::cos(x[0]); };
    ScaProblem p;
    p.objective = f;
    p.build = [](const Eigen::VectorXd& x0) {
      Model m;
      const int x = m.add_var(x0[0]);
      const double c = x0[0];
      // 4cos(x) <= 4cos(c) - 4 sin(c)(x-c) + 2 (x-c)^2
      const int e = m.square_over(m.var(x), 1.0, c * c + 1.0);
      const int q = m.square_over(m.var(x) - c, 1.0, 1.0);
      m.add_objective(m.var(e) + 2.0 * m.var(q) + (-4.0 * std::sin(c)) * (m.var(x) - c) +
                      Affine(4.0 * std::cos(c)));
      return m.program();
    };
    const ScaState st = sca_loop(p, Eigen::Vector3d(0.3, 1.0, 1.0), {1e-9, 50});
    for (std::size_t i = 1; i < st.history.size(); ++i) CHECK(st.history[i] <= st.history[i - 1]);
    // Stationary point of x^2 + 4cos x: 2x = 4 sin x.
    CHECK(2 * st.iterate[0] == doctest::Approx(4 * std::sin(st.iterate[0])).epsilon(1e-3));
  }
  SUBCASE("infeasible first surrogate is reported") {
    ScaProblem p;
    p.objective = [](const Eigen::VectorXd&) { return 0.0; };
    p.build = [](const Eigen::VectorXd&) {
      ConicProgram prog;
      prog.num_vars = 1;
      prog.objective = Eigen::VectorXd::Zero(1);
      prog.psds.push_back({-Eigen::MatrixXd::Identity(2, 2), {}});
      return prog;
    };
    ScaOptions strict;
    strict.elastic = false;
    CHECK_THROWS_AS(sca_loop(p, Eigen::VectorXd::Zero(1), strict), ScaError);
    const ScaState st = sca_loop(p, Eigen::VectorXd::Zero(1));
    CHECK(st.penalty_used);
    CHECK(st.max_slack == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("linearization checker") {
  auto affine = [](const Eigen::VectorXd& x) { return 3.0 * x[0] - 2.0 * x[1] + 1.0; };
  const LinearizationCheck a = check_linearization(affine, affine, Eigen::Vector2d(1, 2), 1.0);
  CHECK(a.worst_gap < 1e-12);

  auto f = [](const Eigen::VectorXd& x) { return std::exp(x[0]) * std::sin(x[1]); };
  const Eigen::Vector2d x0(0.3, 0.7);
  auto model = [&](const Eigen::VectorXd& x) {
    const double e = std::exp(x0[0]);
    return e * std::sin(x0[1]) + e * std::sin(x0[1]) * (x[0] - x0[0]) + e * std::cos(x0[1]) * (x[1] - x0[1]);
  };
  const LinearizationCheck c = check_linearization(f, model, x0, 0.1, 32, 4);
  // Second-order behaviour: the ratio settles as the radius shrinks.
  CHECK(c.ratio.back() == doctest::Approx(c.ratio[c.ratio.size() - 2]).epsilon(0.1));
  CHECK(c.ratio.back() < 2.0);
}
