#include "diralg/constraints.hpp"

#include "diralg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace diralg {

namespace {

void check_indices(const std::vector<int>& idx, int bound, const char* what) {
  std::set<int> seen;
  for (int i : idx) {
    if (i < 0 || i >= bound) {
      std::ostringstream os;
      os << what << " index " << i << " is out of range [0, " << bound << ")";
      throw ConstraintError(os.str());
    }
    if (!seen.insert(i).second) {
      std::ostringstream os;
      os << what << " index " << i << " is repeated";
      throw ConstraintError(os.str());
    }
  }
}

bool contains(const std::vector<int>& idx, int i) {
  return std::find(idx.begin(), idx.end(), i) != idx.end();
}

const LinearConstraint& model_of(const std::variant<LinearConstraint, AffineConstraint>& c) {
  if (std::holds_alternative<LinearConstraint>(c)) return std::get<LinearConstraint>(c);
  return std::get<AffineConstraint>(c).model();
}

Vector offset_of(const std::variant<LinearConstraint, AffineConstraint>& c, const Vector& x, int n,
                 int m) {
  if (std::holds_alternative<AffineConstraint>(c)) {
    return std::get<AffineConstraint>(c).offset_at(x, n, m);
  }
  return Vector::Zero(model_of(c).rows_at(x, n, m).rows());
}

LocalForm closed_form(const Induced& ind, const Vector& x) {
  const LocalForm b = local_form(*ind.base, x);
  const LinearConstraint& model = model_of(ind.constraint);
  const std::vector<int>& sel = model.fiber_selector();
  const int n = ind.base->chart().base_dim();
  const int m = ind.base->chart().fiber_dim();
  const int unit = std::holds_alternative<AffineConstraint>(ind.constraint)
                       ? std::get<AffineConstraint>(ind.constraint).unit_index()
                       : -1;
  const auto nsel = static_cast<Eigen::Index>(sel.size());

  LocalForm f;
  f.vel = Matrix::Zero(n + nsel, n + m);
  f.vel.topRows(n) = b.vel;
  f.vel_offset = Vector::Zero(n + nsel);
  for (Eigen::Index r = 0; r < nsel; ++r) {
    f.vel(n + r, n + sel[r]) = 1.0;
    if (sel[r] == unit) f.vel_offset(n + r) = 1.0;
  }
  std::vector<int> kept;
  for (int k = 0; k < m; ++k) {
    if (!contains(sel, k)) kept.push_back(k);
  }
  f.mom.resize(static_cast<Eigen::Index>(kept.size()), n + m);
  f.bilinear = Tensor3(static_cast<int>(kept.size()), n + m, m);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    f.mom.row(static_cast<Eigen::Index>(r)) = b.mom.row(kept[r]);
    for (int c = 0; c < n + m; ++c) {
      for (int j = 0; j < m; ++j) f.bilinear(static_cast<int>(r), c, j) = b.bilinear(kept[r], c, j);
    }
  }
  return f;
}

LocalForm generic_form(const Induced& ind, const Vector& x) {
  const LocalForm b = local_form(*ind.base, x);
  const int n = ind.base->chart().base_dim();
  const int m = ind.base->chart().fiber_dim();
  const int total = n + m;
  const Matrix w = model_of(ind.constraint).rows_at(x, n, m);
  const Vector wo = offset_of(ind.constraint, x, n, m);

  Matrix stacked(b.vel.rows() + w.rows(), total);
  stacked << b.vel, w;
  Vector rhs(stacked.rows());
  rhs << b.vel_offset, wo;

  LocalForm f;
  if (stacked.rows() == 0) {
    f.vel = Matrix(0, total);
    f.vel_offset = Vector(0);
    f.mom = b.mom;
    f.bilinear = b.bilinear;
    return f;
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kRankTolerance * sv(0)) ++k;
  }
  const Matrix vk = svd.matrixV().leftCols(k);
  const Matrix uk = svd.matrixU().leftCols(k);
  f.vel = vk.transpose();
  f.vel_offset = (uk.transpose() * rhs).cwiseQuotient(sv.head(k));
  const Vector particular = vk * f.vel_offset;
  const double mismatch = (stacked * particular - rhs).norm();
  if (mismatch > 1e-9 * std::max(1.0, rhs.norm())) {
    std::ostringstream os;
    os << "affine constraint does not meet the velocity bundle (mismatch " << mismatch << ")";
    throw ConstraintError(os.str());
  }

  // V^0 = row span of the stacked equations; keep the momentum equations that
  // do not see it.
  const Matrix zv = b.mom * vk;
  const Matrix keep = annihilator(zv);
  const auto q = keep.cols();
  if (k + q != total) {
    std::ostringstream os;
    os << "induced structure has rank " << k + q << ", expected " << total;
    throw StructureError(os.str(), static_cast<int>(k + q));
  }
  f.mom = keep.transpose() * b.mom;
  f.bilinear = Tensor3(static_cast<int>(q), total, m);
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < total; ++c) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (Eigen::Index z = 0; z < b.mom.rows(); ++z) {
          s += keep(z, r) * b.bilinear(static_cast<int>(z), c, j);
        }
        f.bilinear(r, c, j) = s;
      }
    }
  }
  return f;
}

/// Checks V inside Vel_D (general W) and constant rank on support probes, and
/// that the induced form can be assembled there.
void check_support(const DiracAlgebroid& d, const Induced& ind) {
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const LinearConstraint& model = model_of(ind.constraint);
  ProbeSampler sampler(0xc0457ULL);
  int rank_w = -1;
  for (int p = 0; p < kSupportProbes; ++p) {
    const Vector x = support_point(sampler, n, model.base_selector());
    if (!model.is_adapted()) {
      const Matrix w = model.rows_at(x, n, m);
      const LocalForm b = local_form(d, x);
      Matrix stacked(b.vel.rows() + w.rows(), n + m);
      stacked << b.vel, w;
      const int rw = numeric_rank(w);
      if (numeric_rank(stacked) != rw) {
        throw ConstraintError("constraint subbundle is not contained in the velocity bundle");
      }
      if (rank_w >= 0 && rw != rank_w) {
        throw StructureError("constraint matrix changes rank on the support", rw);
      }
      rank_w = rw;
    }
    if (ind.closed_form) {
      closed_form(ind, x);
    } else {
      generic_form(ind, x);
    }
  }
}

DiracAlgebroid make_induced(const DiracAlgebroid& d,
                            std::variant<LinearConstraint, AffineConstraint> constraint) {
  Induced ind;
  ind.base = std::make_shared<const DiracAlgebroid>(d);
  ind.constraint = std::move(constraint);
  ind.closed_form = d.is<PiGraph>() && model_of(ind.constraint).is_adapted();
  check_support(d, ind);
  return DiracAlgebroid(d.chart(), std::move(ind));
}

}  // namespace

LinearConstraint LinearConstraint::adapted(std::vector<int> base_selector,
                                           std::vector<int> fiber_selector) {
  LinearConstraint c;
  c.base_selector_ = std::move(base_selector);
  c.fiber_selector_ = std::move(fiber_selector);
  return c;
}

LinearConstraint LinearConstraint::general(MatrixField w, std::vector<int> base_selector) {
  if (!w) throw ConstraintError("general constraint requires a matrix field");
  LinearConstraint c;
  c.base_selector_ = std::move(base_selector);
  c.matrix_ = std::move(w);
  return c;
}

Matrix LinearConstraint::rows_at(const Vector& x, int n, int m) const {
  if (matrix_) {
    Matrix w = matrix_(x);
    if (w.cols() != n + m) throw ConstraintError("constraint matrix must have n + m columns");
    return w;
  }
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(fiber_selector_.size()), n + m);
  for (std::size_t r = 0; r < fiber_selector_.size(); ++r) {
    w(static_cast<Eigen::Index>(r), n + fiber_selector_[r]) = 1.0;
  }
  return w;
}

void LinearConstraint::validate(int n, int m) const {
  check_indices(base_selector_, n, "base selector");
  check_indices(fiber_selector_, m, "fiber selector");
}

AffineConstraint AffineConstraint::adapted(std::vector<int> base_selector,
                                           std::vector<int> fiber_selector, int unit_index) {
  if (contains(fiber_selector, unit_index)) {
    throw ConstraintError("unit index must not appear in the fiber selector");
  }
  fiber_selector.push_back(unit_index);
  AffineConstraint a;
  a.model_ = LinearConstraint::adapted(std::move(base_selector), std::move(fiber_selector));
  a.unit_index_ = unit_index;
  return a;
}

AffineConstraint AffineConstraint::general(MatrixField w, VectorField offset,
                                           std::vector<int> base_selector) {
  if (!offset) throw ConstraintError("general affine constraint requires an offset field");
  AffineConstraint a;
  a.model_ = LinearConstraint::general(std::move(w), std::move(base_selector));
  a.offset_ = std::move(offset);
  return a;
}

Vector AffineConstraint::offset_at(const Vector& x, int n, int m) const {
  if (offset_) {
    Vector w = offset_(x);
    if (w.size() != model_.rows_at(x, n, m).rows()) {
      throw ConstraintError("affine offset size does not match the constraint rows");
    }
    return w;
  }
  const std::vector<int>& sel = model_.fiber_selector();
  Vector w = Vector::Zero(static_cast<Eigen::Index>(sel.size()));
  for (std::size_t r = 0; r < sel.size(); ++r) {
    if (sel[r] == unit_index_) w(static_cast<Eigen::Index>(r)) = 1.0;
  }
  return w;
}

void AffineConstraint::validate(int n, int m) const {
  model_.validate(n, m);
  if (model_.is_adapted() && (unit_index_ < 0 || unit_index_ >= m)) {
    throw ConstraintError("unit index is out of range");
  }
}

Vector support_point(ProbeSampler& sampler, int n, const std::vector<int>& base_selector) {
  Vector x = sampler.base_point(n);
  for (int a : base_selector) x(a) = 0.0;
  return x;
}

DiracAlgebroid induce(const DiracAlgebroid& d, const LinearConstraint& v) {
  v.validate(d.chart().base_dim(), d.chart().fiber_dim());
  return make_induced(d, v);
}

DiracAlgebroid induce_affine(const DiracAlgebroid& d, const AffineConstraint& a) {
  a.validate(d.chart().base_dim(), d.chart().fiber_dim());
  return make_induced(d, a);
}

LocalForm induced_local_form(const Induced& ind, const Chart&, const Vector& x) {
  return ind.closed_form ? closed_form(ind, x) : generic_form(ind, x);
}

PhaseForm induced_phase_form(const Induced& ind, const Chart& chart, const Vector& x) {
  const PhaseForm b = phase_form(*ind.base, x);
  const std::vector<int>& sel = model_of(ind.constraint).base_selector();
  const auto extra = static_cast<Eigen::Index>(sel.size());
  PhaseForm f;
  f.offset.resize(b.rows() + extra);
  f.xi_coeff = Matrix::Zero(b.rows() + extra, chart.fiber_dim());
  f.offset.head(b.rows()) = b.offset;
  f.xi_coeff.topRows(b.rows()) = b.xi_coeff;
  for (Eigen::Index r = 0; r < extra; ++r) f.offset(b.rows() + r) = x(sel[r]);
  return f;
}

Matrix pointwise_induce(const DiracAlgebroid& d, const LinearConstraint& v, const Vector& x,
                        const Vector& xi) {
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const int total = n + m;
  v.validate(n, m);
  for (int a : v.base_selector()) {
    if (std::abs(x(a)) > 1e-12) throw ContractError("pointwise_induce: x is not on the support");
  }
  const Matrix basis = basis_at(d, x, xi);

  // (xdot, y) part of each basis direction.
  Matrix vel_part(total, basis.cols());
  vel_part.topRows(n) = basis.topRows(n);
  vel_part.bottomRows(m) = basis.bottomRows(m);

  const Matrix w = v.rows_at(x, n, m);
  const Matrix coeff = w.rows() == 0 ? Matrix::Identity(basis.cols(), basis.cols())
                                     : null_space(w * vel_part);
  const Matrix tilde = basis * coeff;

  Matrix v_sub(total, tilde.cols());
  v_sub.topRows(n) = tilde.topRows(n);
  v_sub.bottomRows(m) = tilde.bottomRows(m);
  const Matrix v_basis = orthonormal_columns(v_sub);
  const Matrix v0 = annihilator(v_basis);

  // Embed (p, xidot) into the (xdot, xidot, p, y) layout.
  Matrix v0_embedded = Matrix::Zero(2 * total, v0.cols());
  v0_embedded.block(n + m, 0, n, v0.cols()) = v0.topRows(n);
  v0_embedded.block(n, 0, m, v0.cols()) = v0.bottomRows(m);

  Matrix assembled(2 * total, tilde.cols() + v0.cols());
  assembled << tilde, v0_embedded;
  const Matrix out = orthonormal_columns(assembled);
  if (out.cols() != total) {
    std::ostringstream os;
    os << "pointwise induction produced dimension " << out.cols() << ", expected " << total;
    throw StructureError(os.str(), static_cast<int>(out.cols()));
  }
  return out;
}

const IntegrabilityEntry* IntegrabilityReport::find(const std::string& label) const {
  for (const auto* list : {&cond1_entries, &cond2_entries}) {
    for (const auto& e : *list) {
      if (e.label == label) return &e;
    }
  }
  return nullptr;
}

IntegrabilityReport check_integrability(const DiracAlgebroid& d, int probes) {
  if (!d.is<Induced>()) throw ConstraintError("check_integrability expects an induced structure");
  const Induced& ind = d.as<Induced>();
  if (!ind.base->is<PiGraph>() || !std::holds_alternative<LinearConstraint>(ind.constraint) ||
      !std::get<LinearConstraint>(ind.constraint).is_adapted()) {
    throw ConstraintError(
        "check_integrability supports only pi-graph bases with adapted linear constraints");
  }
  const SkewAlgebroid& alg = ind.base->as<PiGraph>().algebroid;
  const LinearConstraint& v = std::get<LinearConstraint>(ind.constraint);
  const int n = alg.chart().base_dim();
  const int m = alg.chart().fiber_dim();
  const std::vector<int>& a_sel = v.base_selector();
  const std::vector<int>& i_sel = v.fiber_selector();
  std::vector<int> free;
  for (int i = 0; i < m; ++i) {
    if (!contains(i_sel, i)) free.push_back(i);
  }

  IntegrabilityReport rep;
  rep.probes = probes;
  for (int b : a_sel) {
    for (int i : free) {
      IntegrabilityEntry e;
      e.label = "rho^" + std::to_string(b) + "_" + std::to_string(i);
      e.indices = {b, i};
      rep.cond1_entries.push_back(e);
    }
  }
  for (int up : i_sel) {
    for (std::size_t p = 0; p < free.size(); ++p) {
      for (std::size_t q = p + 1; q < free.size(); ++q) {
        IntegrabilityEntry e;
        e.label = "c^" + std::to_string(up) + "_{" + std::to_string(free[p]) +
                  std::to_string(free[q]) + "}";
        e.indices = {free[p], free[q], up};
        rep.cond2_entries.push_back(e);
      }
    }
  }

  ProbeSampler sampler(0x1e9a1ULL);
  for (int p = 0; p < probes; ++p) {
    const Vector x = support_point(sampler, n, a_sel);
    const Matrix rho = eval_anchor(alg, x);
    const Tensor3 c = eval_structure(alg, x);
    for (auto& e : rep.cond1_entries) {
      const double val = std::abs(rho(e.indices[0], e.indices[1]));
      if (e.x.size() == 0 || val > e.value) {
        e.value = val;
        e.x = x;
      }
    }
    for (auto& e : rep.cond2_entries) {
      const double val = std::abs(c(e.indices[0], e.indices[1], e.indices[2]));
      if (e.x.size() == 0 || val > e.value) {
        e.value = val;
        e.x = x;
      }
    }
    if (m >= 3) rep.base_jacobi_max = std::max(rep.base_jacobi_max, max_basis_jacobiator(alg, x));
  }
  for (const auto& e : rep.cond1_entries) rep.cond1_max = std::max(rep.cond1_max, e.value);
  for (const auto& e : rep.cond2_entries) rep.cond2_max = std::max(rep.cond2_max, e.value);
  rep.cond1 = rep.cond1_max <= 1e-9;
  rep.cond2 = rep.cond2_max <= 1e-9;
  rep.base_is_lie = rep.base_jacobi_max <= 1e-6;
  rep.dirac_lie = rep.cond1 && rep.cond2 && rep.base_is_lie;
  return rep;
}

}  // namespace diralg
