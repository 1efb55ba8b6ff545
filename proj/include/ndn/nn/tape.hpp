#pragma once

#include <Eigen/Core>
#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace ndn::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Learned tensor. `grad` accumulates across backward passes until the optimizer clears it.
template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
};

template <typename T>
class Tape;

/// Handle to a value recorded on a Tape.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, int id) : tape_(tape), id_(id) {}

  [[nodiscard]] const Matrix<T>& value() const { return tape_->value(id_); }
  [[nodiscard]] Eigen::Index rows() const { return value().rows(); }
  [[nodiscard]] Eigen::Index cols() const { return value().cols(); }
  [[nodiscard]] Tape<T>* tape() const { return tape_; }
  [[nodiscard]] int id() const { return id_; }
  [[nodiscard]] bool valid() const { return tape_ != nullptr; }
  /// Gradient after Tape::backward (zero-sized when nothing reached this value).
  [[nodiscard]] const Matrix<T>& grad() const { return tape_->grad_or_empty(id_); }

 private:
  Tape<T>* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode recorder. Values live in a deque so references stay valid
// while new nodes are appended. A tape built with `record = false` keeps no
// backward closures and serves inference.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> constant(Matrix<T> value);
  Var<T> param(Parameter<T>& p);
  /// Appends an op result. `backward` runs only when some input needs a gradient.
  Var<T> push(Matrix<T> value, bool needs_grad, BackwardFn backward);

  [[nodiscard]] const Matrix<T>& value(int id) const;
  [[nodiscard]] bool needs_grad(int id) const { return nodes_[static_cast<size_t>(id)].needs_grad; }
  [[nodiscard]] bool recording() const { return record_; }
  /// Gradient buffer of node `id`, zero-initialised on first access.
  Matrix<T>& grad(int id);
  [[nodiscard]] const Matrix<T>& grad_or_empty(int id) const { return nodes_[static_cast<size_t>(id)].grad; }

  /// Seeds d(loss) = 1 for a 1x1 loss and propagates; parameter gradients are added to Parameter::grad.
  void backward(Var<T> loss);
  [[nodiscard]] size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix<T> value;
    const Matrix<T>* external = nullptr;
    Parameter<T>* param = nullptr;
    Matrix<T> grad;
    bool needs_grad = false;
    BackwardFn backward;
  };

  bool record_;
  std::deque<Node> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace ndn::nn
