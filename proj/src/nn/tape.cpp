#include "ndn/nn/tape.hpp"

#include <stdexcept>

namespace ndn::nn {

template <typename T>
Var<T> Tape<T>::constant(Matrix<T> value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Tape<T>::param(Parameter<T>& p) {
  Node node;
  node.external = &p.value;
  node.param = &p;
  node.needs_grad = record_;
  nodes_.push_back(std::move(node));
  return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Tape<T>::push(Matrix<T> value, bool needs_grad, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = record_ && needs_grad;
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
const Matrix<T>& Tape<T>::value(int id) const {
  const Node& n = nodes_[static_cast<size_t>(id)];
  return n.external != nullptr ? *n.external : n.value;
}

template <typename T>
Matrix<T>& Tape<T>::grad(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.size() == 0) {
    const auto& v = value(id);
    n.grad = Matrix<T>::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var<T> loss) {
  if (!record_) throw std::logic_error("backward on a non-recording tape");
  if (loss.tape() != this || loss.rows() != 1 || loss.cols() != 1) {
    throw std::invalid_argument("backward expects a 1x1 loss recorded on this tape");
  }
  grad(loss.id()).setOnes();
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param != nullptr) {
      if (n.param->grad.size() == 0) n.param->grad = Matrix<T>::Zero(n.grad.rows(), n.grad.cols());
      n.param->grad += n.grad;
    }
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace ndn::nn
