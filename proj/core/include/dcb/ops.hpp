#pragma once

#include <vector>

#include "dcb/tape.hpp"
#include "dcb/tensor.hpp"

namespace dcb {

/// Differentiable primitives. Every function computes its value eagerly and,
/// when a tape is active and an input is tracked, records the reverse rule.
/// Shapes follow the tokens-by-features convention: a latent state is L x D,
/// projections multiply on the right (out = z * W).

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

/// scale * t + shift, elementwise.
Tensor affine(const Tensor& t, double scale, double shift);
Tensor square(const Tensor& t);

/// Numerically stable logistic; saturates cleanly for |x| beyond the
/// representable exponent range.
Tensor sigmoid(const Tensor& t);

/// Max-subtracted softmax over a nonempty 1-D tensor.
Tensor softmax(const Tensor& t);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& t);

/// Column means of an L x D matrix -> [D]. (Spatial pooling over tokens.)
Tensor mean_pool_tokens(const Tensor& t);
/// Row means of an R x D matrix -> [R]. (Pooling over the feature axis.)
Tensor mean_pool_features(const Tensor& t);

/// [a | b] along the feature (column) axis; equal row counts.
Tensor concat_features(const Tensor& a, const Tensor& b);

/// Repeat a 1-D row vector into an nrows x len matrix.
Tensor broadcast_row(const Tensor& v, int nrows);

/// Row i of a matrix as a 1-D tensor.
Tensor row(const Tensor& t, int i);

/// Stack equal-length 1-D tensors into an R x len matrix.
Tensor stack_rows(const std::vector<Tensor>& rows);

/// Same data, new shape (element count preserved).
Tensor reshape(const Tensor& t, Shape shape);

/// Concatenate the flattened inputs into one 1-D tensor.
Tensor concat_flat(const std::vector<Tensor>& parts);

/// out[j] = t.flat[idx[j]]; gradient scatter-adds back. Indices may repeat.
Tensor gather(const Tensor& t, const std::vector<long long>& idx);

Tensor sum_all(const Tensor& t);
Tensor mean_all(const Tensor& t);

/// sum_i w[i] * entries[i]; w is 1-D with one weight per entry, entries share
/// a shape. The temporal contraction used for memory aggregation.
Tensor weighted_sum(const Tensor& w, const std::vector<Tensor>& entries);

/// z * W for a 1-D vector z (row-vector convention): [D] x [D x D'] -> [D'].
Tensor vecmat(const Tensor& v, const Tensor& w);

}  // namespace dcb
