#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dgad::ad {

using Matrix = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  const Matrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Records operations for a single forward pass; backward() pushes adjoints to
// every node and accumulates into the Parameter::grad of leaf parameters.
class Tape {
 public:
  using Backward = std::function<void(Tape&, int self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var param(Parameter& p);
  Var record(Matrix value, std::initializer_list<Var> parents, Backward backward);
  Var record(Matrix value, const std::vector<Var>& parents, Backward backward);

  void backward(Var root);

  const Matrix& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Matrix& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
  bool requires_grad(int id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }

  template <typename Expr>
  void accumulate(int id, const Eigen::MatrixBase<Expr>& g) {
    auto& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;
};

Var matmul(Var a, Var b);
Var matmul_nt(Var a, Var b);                // a * b^T
Var lmul(const Matrix& c, Var b);           // constant on the left
Var add(Var a, Var b);
Var add_row(Var a, Var row);                // broadcast a 1 x d row over a
Var hadamard(Var a, Var b);
Var relu(Var a);
Var sigmoid(Var a);
Var scale(Var a, double s);
Var softmax_rows(Var a);
Var layer_norm_rows(Var a, Var gamma, Var beta, double eps = 1e-5);
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);
// out.row(i) = src.row(idx[i]) for idx[i] >= 0, fill (1 x d) otherwise.
Var gather_rows(Var src, Var fill, const std::vector<int>& idx);
Var sum(Var a);
// Clamped binary cross-entropy of a 1x1 probability.
Var bce(Var prob, double label, double eps = 1e-7);

}  // namespace dgad::ad
