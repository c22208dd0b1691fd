#include <airsea/conic/program.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace airsea::conic {

double Affine::eval(const VectorXd& x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x[i];
  return v;
}

Affine& Affine::compress() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().first == t.first)
      out.back().second += t.second;
    else
      out.push_back(t);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const auto& t) { return t.second == 0.0; }),
            out.end());
  terms = std::move(out);
  return *this;
}

Affine& Affine::operator+=(const Affine& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

Affine& Affine::operator-=(const Affine& o) {
  for (const auto& [i, c] : o.terms) terms.push_back({i, -c});
  constant -= o.constant;
  return *this;
}

Affine& Affine::operator*=(double s) {
  for (auto& t : terms) t.second *= s;
  constant *= s;
  return *this;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator-(Affine a) { return a *= -1.0; }
Affine operator*(double s, Affine a) { return a *= s; }
Affine operator*(Affine a, double s) { return a *= s; }

MatrixXd PsdBlock::eval(const VectorXd& x) const {
  MatrixXd F = constant;
  for (const auto& [i, Fi] : terms) F += x[i] * Fi;
  return F;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::iteration_limit: return "iteration-limit";
    case Status::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

void check_affine(const Affine& a, int n, const char* where) {
  if (!std::isfinite(a.constant)) throw std::invalid_argument(std::string(where) + ": non-finite constant");
  for (const auto& [i, c] : a.terms) {
    if (i < 0 || i >= n) throw std::invalid_argument(std::string(where) + ": variable index out of range");
    if (!std::isfinite(c)) throw std::invalid_argument(std::string(where) + ": non-finite coefficient");
  }
}

}  // namespace

void ConicProgram::check() const {
  if (objective.size() != num_vars) throw std::invalid_argument("objective dimension mismatch");
  if (!objective.allFinite() || !std::isfinite(objective_constant))
    throw std::invalid_argument("objective not finite");
  if (warm_start && warm_start->size() != num_vars) throw std::invalid_argument("warm start dimension mismatch");
  for (const auto& a : linear) check_affine(a, num_vars, "linear");
  for (const auto& s : socs) {
    check_affine(s.bound, num_vars, "soc bound");
    for (const auto& r : s.rows) check_affine(r, num_vars, "soc row");
  }
  for (const auto& p : psds) {
    if (p.constant.rows() != p.constant.cols()) throw std::invalid_argument("psd constant not square");
    for (const auto& [i, F] : p.terms) {
      if (i < 0 || i >= num_vars) throw std::invalid_argument("psd: variable index out of range");
      if (F.rows() != p.order() || F.cols() != p.order()) throw std::invalid_argument("psd: block order mismatch");
    }
  }
}

double ConicProgram::barrier_degree() const {
  double nu = double(linear.size()) + 2.0 * double(socs.size());
  for (const auto& p : psds) nu += p.order();
  return nu;
}

double max_violation(const ConicProgram& prog, const VectorXd& x) {
  double worst = 0.0;
  for (const auto& a : prog.linear) worst = std::max(worst, -a.eval(x));
  for (const auto& s : prog.socs) {
    double r2 = 0.0;
    for (const auto& r : s.rows) r2 += std::pow(r.eval(x), 2);
    worst = std::max(worst, std::sqrt(r2) - s.bound.eval(x));
  }
  for (const auto& p : prog.psds) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(p.eval(x), Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
  }
  return worst;
}

ConicProgram elastic(const ConicProgram& prog, double weight) {
  ConicProgram out = prog;
  const int s = prog.num_vars;
  out.num_vars = s + 1;
  out.objective.conservativeResize(s + 1);
  out.objective[s] = weight;
  const Affine slack = Affine::variable(s);
  for (auto& a : out.linear) a += slack;
  for (auto& c : out.socs) c.bound += slack;
  for (auto& p : out.psds) p.terms.push_back({s, MatrixXd::Identity(p.order(), p.order())});
  out.linear.push_back(slack);
  if (prog.warm_start) {
    out.warm_start->conservativeResize(s + 1);
    (*out.warm_start)[s] = max_violation(prog, *prog.warm_start) + 1.0;
  }
  return out;
}

namespace {

void print_affine(const Affine& a, std::ostream& os) {
  os << a.constant;
  for (const auto& [i, c] : a.terms) os << (c < 0 ? " - " : " + ") << std::abs(c) << "*x" << i;
}

}  // namespace

void dump(const ConicProgram& prog, std::ostream& os) {
  os << "vars " << prog.num_vars << "\nminimize " << prog.objective_constant;
  for (int i = 0; i < prog.num_vars; ++i)
    if (prog.objective[i] != 0.0) os << " + " << prog.objective[i] << "*x" << i;
  os << "\n";
  for (const auto& a : prog.linear) {
    os << "lin ";
    print_affine(a, os);
    os << " >= 0\n";
  }
  for (const auto& s : prog.socs) {
    os << "soc ||";
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      os << (r ? ", " : " ");
      print_affine(s.rows[r], os);
    }
    os << " || <= ";
    print_affine(s.bound, os);
    os << "\n";
  }
  for (const auto& p : prog.psds) {
    os << "psd order " << p.order() << "\n  F0 =\n" << p.constant << "\n";
    for (const auto& [i, F] : p.terms) os << "  x" << i << " *\n" << F << "\n";
  }
}

}  // namespace airsea::conic
