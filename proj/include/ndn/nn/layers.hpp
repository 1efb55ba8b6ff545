#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ndn/nn/ops.hpp"
#include "ndn/nn/tape.hpp"

namespace ndn::nn {

inline constexpr double kLeakySlope = 0.2;

/// Owns the parameters of one network. Parameter addresses are stable.
template <typename T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  Parameter<T>& add(std::string name, Eigen::Index rows, Eigen::Index cols);
  [[nodiscard]] Parameter<T>* find(const std::string& name) const;
  [[nodiscard]] const std::vector<std::unique_ptr<Parameter<T>>>& params() const { return params_; }
  [[nodiscard]] size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter<T>>> params_;
};

/// Glorot-uniform weights.
template <typename T>
void init_glorot(Parameter<T>& p, std::mt19937_64& rng);

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore<T>& store, const std::string& name, int in, int out, std::mt19937_64& rng);
  Var<T> operator()(Var<T> x) const;
  [[nodiscard]] int in() const { return in_; }
  [[nodiscard]] int out() const { return out_; }

 private:
  Parameter<T>* w_ = nullptr;
  Parameter<T>* b_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

/// Stack of Linear layers with leaky-rectifier activations between them.
template <typename T>
class Mlp {
 public:
  Mlp() = default;
  /// dims = {in, hidden..., out}
  Mlp(ParamStore<T>& store, const std::string& name, const std::vector<int>& dims, std::mt19937_64& rng,
      bool final_activation = false);
  Var<T> operator()(Var<T> x) const;
  /// Output of layer `k` (0-based), after its activation when it is not the last layer.
  [[nodiscard]] std::vector<Var<T>> forward_all(Var<T> x) const;
  [[nodiscard]] int out() const { return layers_.back().out(); }

 private:
  std::vector<Linear<T>> layers_;
  bool final_activation_ = false;
};

template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParamStore<T>& store, const std::string& name, int vocabulary, int dim, std::mt19937_64& rng);
  Var<T> operator()(Tape<T>& tape, std::vector<int> ids) const;
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int vocabulary() const { return vocabulary_; }

 private:
  Parameter<T>* table_ = nullptr;
  int vocabulary_ = 0;
  int dim_ = 0;
};

/// Adam with bias correction. State is keyed by parameter address.
template <typename T>
class Adam {
 public:
  Adam(T lr, T beta1, T beta2, T eps = T(1e-8)) : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  /// Applies one update from the accumulated gradients, then clears them.
  void step(ParamStore<T>& store);
  [[nodiscard]] long steps() const { return t_; }

 private:
  struct Moments {
    Matrix<T> m;
    Matrix<T> v;
  };
  T lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::pair<const Parameter<T>*, Moments>> state_;
};

extern template class ParamStore<float>;
extern template class ParamStore<double>;
extern template class Linear<float>;
extern template class Linear<double>;
extern template class Mlp<float>;
extern template class Mlp<double>;
extern template class Embedding<float>;
extern template class Embedding<double>;
extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace ndn::nn
