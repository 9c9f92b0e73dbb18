#include "specshare/nn_layers.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "specshare/errors.hpp"

namespace specshare::nn {

namespace {

void check_rows(const Matrix& x, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(x.rows()) != expected) {
    throw ArgumentError(fmt::format("{} expects {} input features, got {}", what, expected, x.rows()));
  }
}

void fill_glorot(std::span<double> w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w) v = dist(rng);
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Softmax: return "softmax";
  }
  return "?";
}

std::string to_string(Activation act) { return act == Activation::Relu ? "relu" : "linear"; }

// Dense

Dense::Dense(std::size_t in, std::size_t out, Activation act)
    : in_(in), out_(out), act_(act), params_(Vector::Zero(Eigen::Index(in * out + out))),
      grads_(Vector::Zero(params_.size())) {
  if (in == 0 || out == 0) throw ArgumentError("dense layer needs nonzero sizes");
}

void Dense::glorot_uniform(Rng& rng) {
  fill_glorot(params().first(in_ * out_), in_, out_, rng);
  bias().setZero();
}

Matrix Dense::affine(const Matrix& x) const {
  check_rows(x, in_, "dense layer");
  Matrix z = weights() * x;
  z.colwise() += bias();
  return z;
}

Matrix Dense::forward(const Matrix& x, Mode, Rng&) {
  pre_activation_ = affine(x);
  input_ = x;
  if (act_ == Activation::Relu) return pre_activation_.cwiseMax(0.0);
  return pre_activation_;
}

Matrix Dense::infer(const Matrix& x) const {
  Matrix z = affine(x);
  if (act_ == Activation::Relu) return z.cwiseMax(0.0);
  return z;
}

Matrix Dense::backward(const Matrix& grad_out) {
  Matrix delta = grad_out;
  if (act_ == Activation::Relu) {
    delta = (pre_activation_.array() > 0.0).select(grad_out, 0.0);
  }
  Eigen::Map<Matrix>(grads_.data(), Eigen::Index(out_), Eigen::Index(in_)).noalias() =
      delta * input_.transpose();
  Eigen::Map<Vector>(grads_.data() + in_ * out_, Eigen::Index(out_)) = delta.rowwise().sum();
  return weights().transpose() * delta;
}

std::string Dense::describe() const {
  return fmt::format("dense {} {} {}", in_, out_, to_string(act_));
}

// Conv2D

Conv2D::Conv2D(std::size_t rows, std::size_t cols, std::size_t filters, std::size_t kernel_width,
               Activation act)
    : rows_(rows), cols_(cols), filters_(filters), width_(kernel_width), act_(act),
      params_(Vector::Zero(Eigen::Index(filters * kernel_width + filters))),
      grads_(Vector::Zero(params_.size())) {
  if (rows == 0 || filters == 0 || kernel_width == 0) {
    throw ArgumentError("conv2d layer needs nonzero sizes");
  }
  if (cols < kernel_width) {
    throw ArgumentError(
        fmt::format("input width {} is smaller than the kernel width {}", cols, kernel_width));
  }
}

void Conv2D::glorot_uniform(Rng& rng) {
  fill_glorot(params().first(filters_ * width_), width_, width_ * filters_, rng);
  bias().setZero();
}

Matrix Conv2D::patches(const Matrix& x) const {
  const auto positions = Eigen::Index(rows_ * cols_);
  const auto pad = static_cast<std::ptrdiff_t>((width_ - 1) / 2);
  Matrix p = Matrix::Zero(Eigen::Index(width_), positions * x.cols());
  for (Eigen::Index b = 0; b < x.cols(); ++b) {
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        const Eigen::Index col = b * positions + Eigen::Index(r * cols_ + c);
        for (std::size_t w = 0; w < width_; ++w) {
          const auto src = static_cast<std::ptrdiff_t>(c + w) - pad;
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(cols_)) {
            p(Eigen::Index(w), col) = x(Eigen::Index(r * cols_) + src, b);
          }
        }
      }
    }
  }
  return p;
}

Matrix Conv2D::convolve(const Matrix& p, Eigen::Index batch) const {
  Matrix z = kernel() * p;
  z.colwise() += bias();
  return Eigen::Map<Matrix>(z.data(), Eigen::Index(output_size()), batch);
}

Matrix Conv2D::forward(const Matrix& x, Mode, Rng&) {
  check_rows(x, input_size(), "conv2d layer");
  patches_ = patches(x);
  pre_activation_ = convolve(patches_, x.cols());
  if (act_ == Activation::Relu) return pre_activation_.cwiseMax(0.0);
  return pre_activation_;
}

Matrix Conv2D::infer(const Matrix& x) const {
  check_rows(x, input_size(), "conv2d layer");
  Matrix z = convolve(patches(x), x.cols());
  if (act_ == Activation::Relu) return z.cwiseMax(0.0);
  return z;
}

Matrix Conv2D::backward(const Matrix& grad_out) {
  Matrix delta = grad_out;
  if (act_ == Activation::Relu) {
    delta = (pre_activation_.array() > 0.0).select(grad_out, 0.0);
  }
  const Eigen::Index batch = delta.cols();
  const auto positions = Eigen::Index(rows_ * cols_);
  Eigen::Map<const Matrix> dz(delta.data(), Eigen::Index(filters_), positions * batch);

  Eigen::Map<Matrix>(grads_.data(), Eigen::Index(filters_), Eigen::Index(width_)).noalias() =
      dz * patches_.transpose();
  Eigen::Map<Vector>(grads_.data() + filters_ * width_, Eigen::Index(filters_)) = dz.rowwise().sum();

  const Matrix dp = kernel().transpose() * dz;
  const auto pad = static_cast<std::ptrdiff_t>((width_ - 1) / 2);
  Matrix dx = Matrix::Zero(Eigen::Index(input_size()), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        const Eigen::Index col = b * positions + Eigen::Index(r * cols_ + c);
        for (std::size_t w = 0; w < width_; ++w) {
          const auto src = static_cast<std::ptrdiff_t>(c + w) - pad;
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(cols_)) {
            dx(Eigen::Index(r * cols_) + src, b) += dp(Eigen::Index(w), col);
          }
        }
      }
    }
  }
  return dx;
}

std::string Conv2D::describe() const {
  return fmt::format("conv2d {} {} {} {} {}", rows_, cols_, filters_, width_, to_string(act_));
}

// Dropout

Dropout::Dropout(std::size_t size, double rate) : size_(size), rate_(0.0) { set_rate(rate); }

void Dropout::set_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ArgumentError(fmt::format("dropout rate {} not in [0,1)", rate));
  rate_ = rate;
}

Matrix Dropout::forward(const Matrix& x, Mode mode, Rng& rng) {
  check_rows(x, size_, "dropout layer");
  masked_ = mode == Mode::Training && rate_ > 0.0;
  if (!masked_) return x;
  std::bernoulli_distribution keep(1.0 - rate_);
  const double scale = 1.0 / (1.0 - rate_);
  mask_.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) mask_(i, j) = keep(rng) ? scale : 0.0;
  }
  return x.cwiseProduct(mask_);
}

Matrix Dropout::backward(const Matrix& grad_out) {
  return masked_ ? Matrix(grad_out.cwiseProduct(mask_)) : grad_out;
}

std::string Dropout::describe() const { return fmt::format("dropout {} {:.17g}", size_, rate_); }

std::string Flatten::describe() const { return fmt::format("flatten {}", size_); }

// Softmax

Matrix Softmax::infer(const Matrix& x) const {
  check_rows(x, size_, "softmax layer");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double peak = x.col(j).maxCoeff();
    out.col(j) = (x.col(j).array() - peak).exp();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

Matrix Softmax::forward(const Matrix& x, Mode, Rng&) {
  output_ = infer(x);
  return output_;
}

Matrix Softmax::backward(const Matrix& grad_out) {
  Matrix dx(grad_out.rows(), grad_out.cols());
  for (Eigen::Index j = 0; j < grad_out.cols(); ++j) {
    const double dot = grad_out.col(j).dot(output_.col(j));
    dx.col(j) = output_.col(j).array() * (grad_out.col(j).array() - dot);
  }
  return dx;
}

std::string Softmax::describe() const { return fmt::format("softmax {}", size_); }

}  // namespace specshare::nn
