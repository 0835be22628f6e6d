#ifndef CUTWALK_JPRODUCT_HPP
#define CUTWALK_JPRODUCT_HPP

#include <algorithm>
#include <complex>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cutwalk/common.hpp"

namespace cutwalk {

enum class Variance { Contra, Co };

struct IndexLabel {
  std::string name;
  Variance variance = Variance::Co;
  bool family = false;  // retained join index: one copy kept, no summation

  bool operator==(const IndexLabel& o) const {
    return name == o.name && variance == o.variance && family == o.family;
  }
};

/// Dense tensor of complex entries, rank <= 4, row-major layout.
///
/// A join product keeps one copy of each repeated index as a "family" axis:
/// such an axis indexes a family of lower-rank tensors rather than acting as
/// a tensor index. contract() sums the family axes away, recovering the
/// ordinary tensor product.
class Tensor {
public:
  Tensor() = default;

  Tensor(std::vector<std::size_t> shape, std::vector<IndexLabel> labels)
      : shape_(std::move(shape)), labels_(std::move(labels)) {
    if (shape_.size() != labels_.size()) throw ValidationError("shape/label rank mismatch");
    if (shape_.size() > 4) throw ValidationError("rank > 4 not supported");
    std::set<std::string> names;
    for (const auto& l : labels_)
      if (!names.insert(l.name).second)
        throw ValidationError("duplicate index name '" + l.name + "' within a tensor");
    std::size_t total = 1;
    for (std::size_t d : shape_) total *= d;
    data_.assign(total, Complex(0.0, 0.0));
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, const std::string& row_name,
                       const std::string& col_name) {
    return Tensor({rows, cols},
                  {{row_name, Variance::Contra, false}, {col_name, Variance::Co, false}});
  }

  static Tensor vector(std::size_t n, const std::string& name,
                       Variance variance = Variance::Co) {
    return Tensor({n}, {{name, variance, false}});
  }

  static Tensor identity(std::size_t n, const std::string& row_name,
                         const std::string& col_name) {
    Tensor t = matrix(n, n, row_name, col_name);
    for (std::size_t i = 0; i < n; ++i) t.at({i, i}) = Complex(1.0, 0.0);
    return t;
  }

  std::size_t rank() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<IndexLabel>& labels() const { return labels_; }
  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  /// Rank counting only true tensor axes (family axes excluded).
  std::size_t tensor_rank() const {
    std::size_t r = 0;
    for (const auto& l : labels_)
      if (!l.family) ++r;
    return r;
  }

  std::size_t family_axis_count() const { return rank() - tensor_rank(); }

  Complex& at(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }
  const Complex& at(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

  std::size_t axis_of(const std::string& name) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i].name == name) return i;
    throw ValidationError("index '" + name + "' not found");
  }

  Tensor operator+(const Tensor& o) const {
    require_same_layout(o);
    Tensor r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }

  Tensor operator-(const Tensor& o) const {
    require_same_layout(o);
    Tensor r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  Tensor scaled(Complex c) const {
    Tensor r = *this;
    for (auto& v : r.data_) v *= c;
    return r;
  }

  /// Reverse the index order: C^T_{ijk} = C_{kji}.
  Tensor transpose() const {
    std::vector<std::size_t> rshape(shape_.rbegin(), shape_.rend());
    std::vector<IndexLabel> rlabels(labels_.rbegin(), labels_.rend());
    Tensor r(rshape, rlabels);
    std::vector<std::size_t> idx(rank(), 0);
    do {
      std::vector<std::size_t> ridx(idx.rbegin(), idx.rend());
      r.at(ridx) = at(idx);
    } while (advance(idx));
    return r;
  }

  /// Slice a family axis at a fixed position, dropping the axis.
  Tensor family_member(const std::string& name, std::size_t pos) const {
    std::size_t ax = axis_of(name);
    if (!labels_[ax].family) throw ValidationError("index '" + name + "' is not a family axis");
    std::vector<std::size_t> nshape;
    std::vector<IndexLabel> nlabels;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (i == ax) continue;
      nshape.push_back(shape_[i]);
      nlabels.push_back(labels_[i]);
    }
    Tensor r(nshape, nlabels);
    if (r.rank() == 0) {
      r.data_[0] = at({pos});
      return r;
    }
    std::vector<std::size_t> idx(r.rank(), 0);
    do {
      std::vector<std::size_t> full;
      std::size_t k = 0;
      for (std::size_t i = 0; i < rank(); ++i)
        full.push_back(i == ax ? pos : idx[k++]);
      r.at(idx) = at(full);
    } while (r.advance(idx));
    return r;
  }

  bool advance(std::vector<std::size_t>& idx) const {
    for (std::size_t i = rank(); i-- > 0;) {
      if (++idx[i] < shape_[i]) return true;
      idx[i] = 0;
    }
    return false;
  }

  /// Largest entrywise difference; requires equal shapes but tolerates label
  /// renames introduced by joins and transposes.
  double max_abs_diff(const Tensor& o) const {
    if (shape_ != o.shape_) throw ValidationError("tensor shapes differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
      worst = std::max(worst, std::abs(data_[i] - o.data_[i]));
    return worst;
  }

private:
  std::size_t offset(const std::vector<std::size_t>& idx) const {
    if (idx.size() != rank()) throw ValidationError("index arity mismatch");
    std::size_t off = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (idx[i] >= shape_[i]) throw ValidationError("tensor index out of range");
      off = off * shape_[i] + idx[i];
    }
    return off;
  }

  void require_same_layout(const Tensor& o) const {
    if (shape_ != o.shape_ || !(labels_ == o.labels_))
      throw ValidationError("tensor layouts differ");
  }

  std::vector<std::size_t> shape_;
  std::vector<IndexLabel> labels_;
  std::vector<Complex> data_;
};

/// Join product: entrywise product over the repeated indices with no
/// summation. Each repeated index must occur contravariantly in one operand
/// and covariantly in the other with matching dimension. The result keeps
/// A's free axes, then one family copy of each repeated index (in the order
/// given), then B's free axes.
inline Tensor join(const Tensor& a, const Tensor& b, const std::vector<std::string>& repeated) {
  std::vector<std::size_t> a_ax, b_ax;
  for (const auto& name : repeated) {
    std::size_t ia = a.axis_of(name), ib = b.axis_of(name);
    if (a.shape()[ia] != b.shape()[ib])
      throw ValidationError("repeated index '" + name + "' has mismatched dimension");
    if (a.labels()[ia].variance == b.labels()[ib].variance)
      throw ValidationError("repeated index '" + name +
                            "' must be contravariant in one operand and covariant in the other");
    a_ax.push_back(ia);
    b_ax.push_back(ib);
  }

  std::vector<std::size_t> a_free, b_free;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (std::find(a_ax.begin(), a_ax.end(), i) == a_ax.end()) a_free.push_back(i);
  for (std::size_t i = 0; i < b.rank(); ++i)
    if (std::find(b_ax.begin(), b_ax.end(), i) == b_ax.end()) b_free.push_back(i);

  std::vector<std::size_t> shape;
  std::vector<IndexLabel> labels;
  for (std::size_t i : a_free) {
    shape.push_back(a.shape()[i]);
    labels.push_back(a.labels()[i]);
  }
  for (std::size_t k = 0; k < repeated.size(); ++k) {
    shape.push_back(a.shape()[a_ax[k]]);
    labels.push_back({repeated[k], a.labels()[a_ax[k]].variance, true});
  }
  for (std::size_t i : b_free) {
    shape.push_back(b.shape()[i]);
    IndexLabel l = b.labels()[i];
    for (const auto& al : labels)
      if (al.name == l.name) l.name += "'";  // keep names unique in the output
    labels.push_back(l);
  }

  Tensor c(shape, labels);
  if (c.data().empty()) return c;
  std::vector<std::size_t> idx(c.rank(), 0);
  const std::size_t na = a_free.size(), nr = repeated.size();
  std::vector<std::size_t> ia(a.rank()), ib(b.rank());
  do {
    for (std::size_t k = 0; k < na; ++k) ia[a_free[k]] = idx[k];
    for (std::size_t k = 0; k < nr; ++k) {
      ia[a_ax[k]] = idx[na + k];
      ib[b_ax[k]] = idx[na + k];
    }
    for (std::size_t k = 0; k < b_free.size(); ++k) ib[b_free[k]] = idx[na + nr + k];
    c.at(idx) = a.at(ia) * b.at(ib);
  } while (c.advance(idx));
  return c;
}

/// Sum over every family axis; join followed by contract is the ordinary
/// tensor product, so rank(contract(join(A,B))) = rank(A) + rank(B) - 2m.
inline Tensor contract(const Tensor& fam) {
  std::vector<std::size_t> fam_ax, keep_ax;
  for (std::size_t i = 0; i < fam.rank(); ++i)
    (fam.labels()[i].family ? fam_ax : keep_ax).push_back(i);
  if (fam_ax.empty()) return fam;

  std::vector<std::size_t> shape;
  std::vector<IndexLabel> labels;
  for (std::size_t i : keep_ax) {
    shape.push_back(fam.shape()[i]);
    labels.push_back(fam.labels()[i]);
  }
  Tensor r(shape, labels);
  std::vector<std::size_t> idx(fam.rank(), 0);
  do {
    std::vector<std::size_t> kidx;
    for (std::size_t i : keep_ax) kidx.push_back(idx[i]);
    if (kidx.empty())
      r.data()[0] += fam.at(idx);
    else
      r.at(kidx) += fam.at(idx);
  } while (fam.advance(idx));
  return r;
}

/// Ordinary matrix product expressed through the join calculus.
inline Tensor matmul(const Tensor& a, const Tensor& b, const std::string& repeated) {
  return contract(join(a, b, {repeated}));
}

}  // namespace cutwalk

#endif
