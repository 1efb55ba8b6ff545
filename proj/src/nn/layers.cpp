#include "ndn/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace ndn::nn {

template <typename T>
Parameter<T>& ParamStore<T>::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (find(name) != nullptr) throw std::invalid_argument("duplicate parameter " + name);
  auto p = std::make_unique<Parameter<T>>();
  p->name = std::move(name);
  p->value = Matrix<T>::Zero(rows, cols);
  params_.push_back(std::move(p));
  return *params_.back();
}

template <typename T>
Parameter<T>* ParamStore<T>::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

template <typename T>
size_t ParamStore<T>::scalar_count() const {
  size_t n = 0;
  for (const auto& p : params_) n += static_cast<size_t>(p->value.size());
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& p : params_) p->grad.resize(0, 0);
}

template <typename T>
void init_glorot(Parameter<T>& p, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index k = 0; k < p.value.size(); ++k) p.value.data()[k] = static_cast<T>(dist(rng));
}

template <typename T>
Linear<T>::Linear(ParamStore<T>& store, const std::string& name, int in, int out, std::mt19937_64& rng)
    : in_(in), out_(out) {
  w_ = &store.add(name + ".weight", in, out);
  b_ = &store.add(name + ".bias", 1, out);
  init_glorot(*w_, rng);
}

template <typename T>
Var<T> Linear<T>::operator()(Var<T> x) const {
  if (x.cols() != in_) {
    throw std::invalid_argument(w_->name + ": expected " + std::to_string(in_) + " input columns, got " +
                                std::to_string(x.cols()));
  }
  Tape<T>& t = *x.tape();
  return add_bias(matmul(x, t.param(*w_)), t.param(*b_));
}

template <typename T>
Mlp<T>::Mlp(ParamStore<T>& store, const std::string& name, const std::vector<int>& dims, std::mt19937_64& rng,
            bool final_activation)
    : final_activation_(final_activation) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  for (size_t k = 0; k + 1 < dims.size(); ++k) {
    layers_.emplace_back(store, name + "." + std::to_string(k), dims[k], dims[k + 1], rng);
  }
}

template <typename T>
std::vector<Var<T>> Mlp<T>::forward_all(Var<T> x) const {
  std::vector<Var<T>> outs;
  for (size_t k = 0; k < layers_.size(); ++k) {
    x = layers_[k](x);
    if (k + 1 < layers_.size() || final_activation_) x = leaky_relu(x, static_cast<T>(kLeakySlope));
    outs.push_back(x);
  }
  return outs;
}

template <typename T>
Var<T> Mlp<T>::operator()(Var<T> x) const {
  return forward_all(x).back();
}

template <typename T>
Embedding<T>::Embedding(ParamStore<T>& store, const std::string& name, int vocabulary, int dim, std::mt19937_64& rng)
    : vocabulary_(vocabulary), dim_(dim) {
  table_ = &store.add(name, vocabulary, dim);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index k = 0; k < table_->value.size(); ++k) table_->value.data()[k] = static_cast<T>(dist(rng));
}

template <typename T>
Var<T> Embedding<T>::operator()(Tape<T>& tape, std::vector<int> ids) const {
  for (int id : ids) {
    if (id < 0 || id >= vocabulary_) {
      throw std::invalid_argument(table_->name + ": id " + std::to_string(id) + " outside vocabulary");
    }
  }
  return gather_rows(tape.param(*table_), std::move(ids));
}

template <typename T>
void Adam<T>::step(ParamStore<T>& store) {
  ++t_;
  const T c1 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta1_), static_cast<double>(t_)));
  const T c2 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta2_), static_cast<double>(t_)));
  if (state_.size() != store.params().size()) {
    state_.clear();
    for (const auto& p : store.params()) {
      state_.push_back({p.get(), Moments{Matrix<T>::Zero(p->value.rows(), p->value.cols()),
                                         Matrix<T>::Zero(p->value.rows(), p->value.cols())}});
    }
  }
  for (size_t k = 0; k < state_.size(); ++k) {
    Parameter<T>& p = *store.params()[k];
    if (p.grad.size() == 0) continue;
    Moments& s = state_[k].second;
    s.m = beta1_ * s.m + (T(1) - beta1_) * p.grad;
    s.v = beta2_ * s.v + (T(1) - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= lr_ * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + eps_);
  }
  store.zero_grad();
}

template class ParamStore<float>;
template class ParamStore<double>;
template void init_glorot(Parameter<float>&, std::mt19937_64&);
template void init_glorot(Parameter<double>&, std::mt19937_64&);
template class Linear<float>;
template class Linear<double>;
template class Mlp<float>;
template class Mlp<double>;
template class Embedding<float>;
template class Embedding<double>;
template class Adam<float>;
template class Adam<double>;

}  // namespace ndn::nn
