#include "dgad/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgad::ad {

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, nullptr, false});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::param(Parameter& p) {
  nodes_.push_back(Node{p.value, {}, {}, &p, true});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, Backward backward) {
  return record(std::move(value), std::vector<Var>(parents), std::move(backward));
}

Var Tape::record(Matrix value, const std::vector<Var>& parents, Backward backward) {
  bool rg = false;
  for (const auto& p : parents) {
    if (p.tape() != this) throw std::logic_error("operands recorded on different tapes");
    rg = rg || requires_grad(p.id());
  }
  nodes_.push_back(Node{std::move(value), {}, rg ? std::move(backward) : Backward{}, nullptr, rg});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw std::logic_error("root belongs to another tape");
  auto& r = nodes_[static_cast<size_t>(root.id())];
  if (!r.requires_grad) return;
  r.grad = Matrix::Ones(r.value.rows(), r.value.cols());
  for (int id = root.id(); id >= 0; --id) {
    auto& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param) n.param->grad += n.grad;
  }
}

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("shape mismatch in ") + what);
}

}  // namespace

Var matmul(Var a, Var b) {
  check(a.cols() == b.rows(), "matmul");
  Tape& t = *a.tape();
  return t.record(a.value() * b.value(), {a, b}, [a, b](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a.id())) tp.accumulate(a.id(), g * b.value().transpose());
    if (tp.requires_grad(b.id())) tp.accumulate(b.id(), a.value().transpose() * g);
  });
}

Var matmul_nt(Var a, Var b) {
  check(a.cols() == b.cols(), "matmul_nt");
  Tape& t = *a.tape();
  return t.record(a.value() * b.value().transpose(), {a, b}, [a, b](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a.id())) tp.accumulate(a.id(), g * b.value());
    if (tp.requires_grad(b.id())) tp.accumulate(b.id(), g.transpose() * a.value());
  });
}

Var lmul(const Matrix& c, Var b) {
  check(c.cols() == b.rows(), "lmul");
  Tape& t = *b.tape();
  return t.record(c * b.value(), {b}, [c, b](Tape& tp, int self) {
    tp.accumulate(b.id(), c.transpose() * tp.grad(self));
  });
}

Var add(Var a, Var b) {
  check(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  Tape& t = *a.tape();
  return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& tp, int self) {
    tp.accumulate(a.id(), tp.grad(self));
    tp.accumulate(b.id(), tp.grad(self));
  });
}

Var add_row(Var a, Var row) {
  check(row.rows() == 1 && row.cols() == a.cols(), "add_row");
  Tape& t = *a.tape();
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return t.record(std::move(out), {a, row}, [a, row](Tape& tp, int self) {
    tp.accumulate(a.id(), tp.grad(self));
    if (tp.requires_grad(row.id())) tp.accumulate(row.id(), tp.grad(self).colwise().sum());
  });
}

Var hadamard(Var a, Var b) {
  check(a.rows() == b.rows() && a.cols() == b.cols(), "hadamard");
  Tape& t = *a.tape();
  return t.record(a.value().cwiseProduct(b.value()), {a, b}, [a, b](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a.id())) tp.accumulate(a.id(), g.cwiseProduct(b.value()));
    if (tp.requires_grad(b.id())) tp.accumulate(b.id(), g.cwiseProduct(a.value()));
  });
}

Var relu(Var a) {
  Tape& t = *a.tape();
  return t.record(a.value().cwiseMax(0.0), {a}, [a](Tape& tp, int self) {
    tp.accumulate(a.id(), tp.grad(self).cwiseProduct(
                              (a.value().array() > 0.0).cast<double>().matrix()));
  });
}

Var sigmoid(Var a) {
  Tape& t = *a.tape();
  Matrix y = a.value().unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return t.record(std::move(y), {a}, [a](Tape& tp, int self) {
    const Matrix& y = tp.value(self);
    tp.accumulate(a.id(), tp.grad(self).cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
  });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape();
  return t.record(a.value() * s, {a}, [a, s](Tape& tp, int self) { tp.accumulate(a.id(), tp.grad(self) * s); });
}

Var softmax_rows(Var a) {
  Tape& t = *a.tape();
  const Matrix& x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mx = x.row(i).maxCoeff();
    y.row(i) = (x.row(i).array() - mx).exp().matrix();
    y.row(i) /= y.row(i).sum();
  }
  return t.record(std::move(y), {a}, [a](Tape& tp, int self) {
    const Matrix& y = tp.value(self);
    const Matrix& g = tp.grad(self);
    Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    Matrix dx = y.cwiseProduct((g.colwise() - dot));
    tp.accumulate(a.id(), dx);
  });
}

Var layer_norm_rows(Var a, Var gamma, Var beta, double eps) {
  check(gamma.rows() == 1 && gamma.cols() == a.cols() && beta.rows() == 1 && beta.cols() == a.cols(),
        "layer_norm_rows");
  Tape& t = *a.tape();
  const Matrix& x = a.value();
  const auto d = static_cast<double>(x.cols());
  Matrix xhat(x.rows(), x.cols());
  Eigen::VectorXd inv_std(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().sum() / d;
    inv_std(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (x.row(i).array() - mu) * inv_std(i);
  }
  Matrix y = xhat;
  y.array().rowwise() *= gamma.value().row(0).array();
  y.rowwise() += beta.value().row(0);
  return t.record(std::move(y), {a, gamma, beta}, [a, gamma, beta, xhat, inv_std, d](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(gamma.id())) tp.accumulate(gamma.id(), g.cwiseProduct(xhat).colwise().sum());
    if (tp.requires_grad(beta.id())) tp.accumulate(beta.id(), g.colwise().sum());
    if (tp.requires_grad(a.id())) {
      Matrix dxhat = g;
      dxhat.array().rowwise() *= gamma.value().row(0).array();
      Matrix dx(g.rows(), g.cols());
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const double m1 = dxhat.row(i).sum() / d;
        const double m2 = dxhat.row(i).dot(xhat.row(i)) / d;
        dx.row(i) = ((dxhat.row(i).array() - m1 - xhat.row(i).array() * m2) * inv_std(i)).matrix();
      }
      tp.accumulate(a.id(), dx);
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols of nothing");
  Tape& t = *parts.front().tape();
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    check(p.rows() == rows, "concat_cols");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return t.record(std::move(out), parts, [parts](Tape& tp, int self) {
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      tp.accumulate(p.id(), tp.grad(self).middleCols(off, p.cols()));
      off += p.cols();
    }
  });
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  check(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols");
  Tape& t = *a.tape();
  return t.record(a.value().middleCols(start, count), {a}, [a, start, count](Tape& tp, int self) {
    if (!tp.requires_grad(a.id())) return;
    Matrix g = Matrix::Zero(a.rows(), a.cols());
    g.middleCols(start, count) = tp.grad(self);
    tp.accumulate(a.id(), g);
  });
}

Var gather_rows(Var src, Var fill, const std::vector<int>& idx) {
  check(fill.rows() == 1 && fill.cols() == src.cols(), "gather_rows");
  Tape& t = *src.tape();
  Matrix out(static_cast<Eigen::Index>(idx.size()), src.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= src.rows()) throw std::out_of_range("gather_rows index");
    out.row(static_cast<Eigen::Index>(i)) = idx[i] >= 0 ? src.value().row(idx[i]) : fill.value().row(0);
  }
  return t.record(std::move(out), {src, fill}, [src, fill, idx](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix gs = Matrix::Zero(src.rows(), src.cols());
    Matrix gf = Matrix::Zero(1, fill.cols());
    for (size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= 0) {
        gs.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
      } else {
        gf.row(0) += g.row(static_cast<Eigen::Index>(i));
      }
    }
    tp.accumulate(src.id(), gs);
    tp.accumulate(fill.id(), gf);
  });
}

Var sum(Var a) {
  Tape& t = *a.tape();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.record(std::move(out), {a}, [a](Tape& tp, int self) {
    tp.accumulate(a.id(), Matrix::Constant(a.rows(), a.cols(), tp.grad(self)(0, 0)));
  });
}

Var bce(Var prob, double label, double eps) {
  check(prob.rows() == 1 && prob.cols() == 1, "bce");
  Tape& t = *prob.tape();
  const double p = prob.scalar();
  const double f = std::clamp(p, eps, 1.0 - eps);
  Matrix out(1, 1);
  out(0, 0) = -(label * std::log(f) + (1.0 - label) * std::log(1.0 - f));
  const bool clamped = f != p;
  return t.record(std::move(out), {prob}, [prob, label, f, clamped](Tape& tp, int self) {
    if (clamped) return;
    Matrix g(1, 1);
    g(0, 0) = tp.grad(self)(0, 0) * (-(label / f) + (1.0 - label) / (1.0 - f));
    tp.accumulate(prob.id(), g);
  });
}

}  // namespace dgad::ad
