#include "dcb/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace dcb {

namespace {

// Record `out` if a tape is active and any input is tracked. `full_vjp`
// produces one gradient per op input; untracked positions are dropped.
Tensor finish(const std::vector<const Tensor*>& inputs, const Tensor& out,
              const std::function<std::vector<Tensor>(const Tensor&)>& full_vjp) {
    Tape* tape = Tape::current();
    if (!tape) return out;
    std::vector<int> nodes;
    std::vector<size_t> positions;
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i]->tracked()) {
            nodes.push_back(inputs[i]->node());
            positions.push_back(i);
        }
    }
    if (nodes.empty()) return out;
    return tape->record(nodes, out, [full_vjp, positions](const Tensor& u) {
        std::vector<Tensor> all = full_vjp(u);
        std::vector<Tensor> kept;
        kept.reserve(positions.size());
        for (size_t p : positions) kept.push_back(std::move(all[p]));
        return kept;
    });
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) throw DimensionError(std::string(op) + ": shape mismatch");
}

void require_rank(const Tensor& t, int rank, const char* op) {
    if (t.rank() != rank) {
        throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                             ", got " + std::to_string(t.rank()));
    }
}

std::vector<double> raw(const Tensor& t) { return t.vec(); }

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-std::min(x, 745.0));
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(std::max(x, -745.0));
    return e / (1.0 + e);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(raw(a));
    for (long long i = 0; i < b.numel(); ++i) out[static_cast<size_t>(i)] += b.at_flat(i);
    Tensor r(a.shape(), std::move(out));
    return finish({&a, &b}, r, [](const Tensor& u) {
        return std::vector<Tensor>{u, u};
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(raw(a));
    for (long long i = 0; i < b.numel(); ++i) out[static_cast<size_t>(i)] -= b.at_flat(i);
    Tensor r(a.shape(), std::move(out));
    return finish({&a, &b}, r, [](const Tensor& u) {
        return std::vector<Tensor>{u, affine(u, -1.0, 0.0)};
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(raw(a));
    for (long long i = 0; i < b.numel(); ++i) out[static_cast<size_t>(i)] *= b.at_flat(i);
    Tensor r(a.shape(), std::move(out));
    return finish({&a, &b}, r, [a, b](const Tensor& u) {
        return std::vector<Tensor>{mul(u, b), mul(u, a)};
    });
}

Tensor affine(const Tensor& t, double scale, double shift) {
    std::vector<double> out(raw(t));
    for (double& v : out) v = scale * v + shift;
    Tensor r(t.shape(), std::move(out));
    return finish({&t}, r, [scale](const Tensor& u) {
        return std::vector<Tensor>{affine(u, scale, 0.0)};
    });
}

Tensor square(const Tensor& t) {
    std::vector<double> out(raw(t));
    for (double& v : out) v *= v;
    Tensor r(t.shape(), std::move(out));
    return finish({&t}, r, [t](const Tensor& u) {
        return std::vector<Tensor>{mul(u, affine(t, 2.0, 0.0))};
    });
}

Tensor sigmoid(const Tensor& t) {
    std::vector<double> out(raw(t));
    for (double& v : out) v = stable_sigmoid(v);
    Tensor r(t.shape(), std::move(out));
    return finish({&t}, r, [r](const Tensor& u) {
        // d sigma = sigma (1 - sigma)
        std::vector<double> d(r.vec());
        for (double& v : d) v = v * (1.0 - v);
        return std::vector<Tensor>{mul(u, Tensor(r.shape(), std::move(d)))};
    });
}

Tensor softmax(const Tensor& t) {
    require_rank(t, 1, "softmax");
    const int n = t.extent(0);
    double mx = t(0);
    for (int i = 1; i < n; ++i) mx = std::max(mx, t(i));
    std::vector<double> out(static_cast<size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        out[static_cast<size_t>(i)] = std::exp(t(i) - mx);
        sum += out[static_cast<size_t>(i)];
    }
    for (double& v : out) v /= sum;
    Tensor r(t.shape(), std::move(out));
    return finish({&t}, r, [r](const Tensor& u) {
        const int n = r.extent(0);
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += u(i) * r(i);
        std::vector<double> d(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = r(i) * (u(i) - dot);
        return std::vector<Tensor>{Tensor(r.shape(), std::move(d))};
    });
}

namespace {
// Plain row-major product, no tape involvement.
Tensor matmul_value(const Tensor& a, const Tensor& b) {
    const int m = a.extent(0), k = a.extent(1), n = b.extent(1);
    std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
    const double* pa = a.data();
    const double* pb = b.data();
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            const double aip = pa[static_cast<size_t>(i) * k + p];
            if (aip == 0.0) continue;
            const double* brow = pb + static_cast<size_t>(p) * n;
            double* orow = out.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) orow[j] += aip * brow[j];
        }
    }
    return Tensor({m, n}, std::move(out));
}

Tensor transpose_value(const Tensor& t) {
    const int m = t.extent(0), n = t.extent(1);
    std::vector<double> out(static_cast<size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(j) * m + i] = t(i, j);
    return Tensor({n, m}, std::move(out));
}
}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    if (a.extent(1) != b.extent(0)) {
        throw DimensionError("matmul: inner extents " + std::to_string(a.extent(1)) + " vs " +
                             std::to_string(b.extent(0)));
    }
    Tensor r = matmul_value(a, b);
    return finish({&a, &b}, r, [a, b](const Tensor& u) {
        return std::vector<Tensor>{matmul_value(u, transpose_value(b)),
                                   matmul_value(transpose_value(a), u)};
    });
}

Tensor transpose(const Tensor& t) {
    require_rank(t, 2, "transpose");
    Tensor r = transpose_value(t);
    return finish({&t}, r, [](const Tensor& u) {
        return std::vector<Tensor>{transpose_value(u)};
    });
}

Tensor mean_pool_tokens(const Tensor& t) {
    require_rank(t, 2, "mean_pool_tokens");
    const int rows = t.extent(0), cols = t.extent(1);
    std::vector<double> out(static_cast<size_t>(cols), 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out[static_cast<size_t>(j)] += t(i, j);
    for (double& v : out) v /= rows;
    Tensor r({cols}, std::move(out));
    return finish({&t}, r, [rows, cols](const Tensor& u) {
        std::vector<double> d(static_cast<size_t>(rows) * cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) d[static_cast<size_t>(i) * cols + j] = u(j) / rows;
        return std::vector<Tensor>{Tensor({rows, cols}, std::move(d))};
    });
}

Tensor mean_pool_features(const Tensor& t) {
    require_rank(t, 2, "mean_pool_features");
    const int rows = t.extent(0), cols = t.extent(1);
    std::vector<double> out(static_cast<size_t>(rows), 0.0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) out[static_cast<size_t>(i)] += t(i, j);
        out[static_cast<size_t>(i)] /= cols;
    }
    Tensor r({rows}, std::move(out));
    return finish({&t}, r, [rows, cols](const Tensor& u) {
        std::vector<double> d(static_cast<size_t>(rows) * cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) d[static_cast<size_t>(i) * cols + j] = u(i) / cols;
        return std::vector<Tensor>{Tensor({rows, cols}, std::move(d))};
    });
}

Tensor concat_features(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "concat_features");
    require_rank(b, 2, "concat_features");
    if (a.extent(0) != b.extent(0)) throw DimensionError("concat_features: row count mismatch");
    const int rows = a.extent(0), ca = a.extent(1), cb = b.extent(1);
    std::vector<double> out(static_cast<size_t>(rows) * (ca + cb));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < ca; ++j) out[static_cast<size_t>(i) * (ca + cb) + j] = a(i, j);
        for (int j = 0; j < cb; ++j) out[static_cast<size_t>(i) * (ca + cb) + ca + j] = b(i, j);
    }
    Tensor r({rows, ca + cb}, std::move(out));
    return finish({&a, &b}, r, [rows, ca, cb](const Tensor& u) {
        std::vector<double> da(static_cast<size_t>(rows) * ca);
        std::vector<double> db(static_cast<size_t>(rows) * cb);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < ca; ++j) da[static_cast<size_t>(i) * ca + j] = u(i, j);
            for (int j = 0; j < cb; ++j) db[static_cast<size_t>(i) * cb + j] = u(i, ca + j);
        }
        return std::vector<Tensor>{Tensor({rows, ca}, std::move(da)),
                                   Tensor({rows, cb}, std::move(db))};
    });
}

Tensor broadcast_row(const Tensor& v, int nrows) {
    require_rank(v, 1, "broadcast_row");
    if (nrows <= 0) throw DimensionError("broadcast_row: nrows must be positive");
    const int len = v.extent(0);
    std::vector<double> out(static_cast<size_t>(nrows) * len);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < len; ++j) out[static_cast<size_t>(i) * len + j] = v(j);
    Tensor r({nrows, len}, std::move(out));
    return finish({&v}, r, [nrows, len](const Tensor& u) {
        std::vector<double> d(static_cast<size_t>(len), 0.0);
        for (int i = 0; i < nrows; ++i)
            for (int j = 0; j < len; ++j) d[static_cast<size_t>(j)] += u(i, j);
        return std::vector<Tensor>{Tensor({len}, std::move(d))};
    });
}

Tensor row(const Tensor& t, int i) {
    require_rank(t, 2, "row");
    if (i < 0 || i >= t.extent(0)) throw DimensionError("row: index out of range");
    const int cols = t.extent(1);
    std::vector<double> out(static_cast<size_t>(cols));
    for (int j = 0; j < cols; ++j) out[static_cast<size_t>(j)] = t(i, j);
    Tensor r({cols}, std::move(out));
    const int rows = t.extent(0);
    return finish({&t}, r, [rows, cols, i](const Tensor& u) {
        std::vector<double> d(static_cast<size_t>(rows) * cols, 0.0);
        for (int j = 0; j < cols; ++j) d[static_cast<size_t>(i) * cols + j] = u(j);
        return std::vector<Tensor>{Tensor({rows, cols}, std::move(d))};
    });
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
    if (rows.empty()) throw DimensionError("stack_rows: no rows");
    const int len = rows[0].extent(0);
    for (const Tensor& r : rows) {
        require_rank(r, 1, "stack_rows");
        if (r.extent(0) != len) throw DimensionError("stack_rows: length mismatch");
    }
    const int n = static_cast<int>(rows.size());
    std::vector<double> out(static_cast<size_t>(n) * len);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < len; ++j)
            out[static_cast<size_t>(i) * len + j] = rows[static_cast<size_t>(i)](j);
    Tensor r({n, len}, std::move(out));
    std::vector<const Tensor*> ins;
    ins.reserve(rows.size());
    for (const Tensor& t : rows) ins.push_back(&t);
    return finish(ins, r, [n, len](const Tensor& u) {
        std::vector<Tensor> gs;
        gs.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            std::vector<double> d(static_cast<size_t>(len));
            for (int j = 0; j < len; ++j) d[static_cast<size_t>(j)] = u(i, j);
            gs.emplace_back(Shape{len}, std::move(d));
        }
        return gs;
    });
}

Tensor reshape(const Tensor& t, Shape shape) {
    Tensor r = t.reshaped_view(std::move(shape));
    Shape orig = t.shape();
    return finish({&t}, r, [orig](const Tensor& u) {
        return std::vector<Tensor>{u.reshaped_view(orig)};
    });
}

Tensor concat_flat(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw DimensionError("concat_flat: no inputs");
    long long total = 0;
    for (const Tensor& p : parts) total += p.numel();
    std::vector<double> out;
    out.reserve(static_cast<size_t>(total));
    for (const Tensor& p : parts) out.insert(out.end(), p.vec().begin(), p.vec().end());
    Tensor r({static_cast<int>(total)}, std::move(out));
    std::vector<const Tensor*> ins;
    std::vector<Shape> shapes;
    for (const Tensor& p : parts) {
        ins.push_back(&p);
        shapes.push_back(p.shape());
    }
    return finish(ins, r, [shapes](const Tensor& u) {
        std::vector<Tensor> gs;
        long long off = 0;
        for (const Shape& s : shapes) {
            const long long n = numel_of(s);
            std::vector<double> d(static_cast<size_t>(n));
            for (long long i = 0; i < n; ++i) d[static_cast<size_t>(i)] = u.at_flat(off + i);
            gs.emplace_back(s, std::move(d));
            off += n;
        }
        return gs;
    });
}

Tensor gather(const Tensor& t, const std::vector<long long>& idx) {
    const long long n = t.numel();
    std::vector<double> out(idx.size());
    for (size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] < 0 || idx[j] >= n) throw DimensionError("gather: index out of range");
        out[j] = t.at_flat(idx[j]);
    }
    Tensor r({static_cast<int>(idx.size())}, std::move(out));
    auto shared_idx = std::make_shared<const std::vector<long long>>(idx);
    Shape orig = t.shape();
    return finish({&t}, r, [shared_idx, orig](const Tensor& u) {
        std::vector<double> d(static_cast<size_t>(numel_of(orig)), 0.0);
        for (size_t j = 0; j < shared_idx->size(); ++j) {
            d[static_cast<size_t>((*shared_idx)[j])] += u.at_flat(static_cast<long long>(j));
        }
        return std::vector<Tensor>{Tensor(orig, std::move(d))};
    });
}

Tensor sum_all(const Tensor& t) {
    double s = 0.0;
    for (long long i = 0; i < t.numel(); ++i) s += t.at_flat(i);
    Tensor r = Tensor::scalar(s);
    Shape orig = t.shape();
    return finish({&t}, r, [orig](const Tensor& u) {
        return std::vector<Tensor>{Tensor::full(orig, u.value())};
    });
}

Tensor mean_all(const Tensor& t) {
    const double n = static_cast<double>(t.numel());
    double s = 0.0;
    for (long long i = 0; i < t.numel(); ++i) s += t.at_flat(i);
    Tensor r = Tensor::scalar(s / n);
    Shape orig = t.shape();
    return finish({&t}, r, [orig, n](const Tensor& u) {
        return std::vector<Tensor>{Tensor::full(orig, u.value() / n)};
    });
}

Tensor weighted_sum(const Tensor& w, const std::vector<Tensor>& entries) {
    require_rank(w, 1, "weighted_sum");
    if (entries.empty()) throw DimensionError("weighted_sum: no entries");
    if (w.extent(0) != static_cast<int>(entries.size())) {
        throw DimensionError("weighted_sum: weight count does not match entry count");
    }
    for (const Tensor& e : entries) require_same_shape(entries[0], e, "weighted_sum");
    const long long n = entries[0].numel();
    std::vector<double> out(static_cast<size_t>(n), 0.0);
    for (size_t i = 0; i < entries.size(); ++i) {
        const double wi = w(static_cast<int>(i));
        for (long long j = 0; j < n; ++j)
            out[static_cast<size_t>(j)] += wi * entries[i].at_flat(j);
    }
    Tensor r(entries[0].shape(), std::move(out));
    std::vector<const Tensor*> ins;
    ins.push_back(&w);
    for (const Tensor& e : entries) ins.push_back(&e);
    auto held = std::make_shared<const std::vector<Tensor>>(entries);
    Tensor wcopy = w;
    return finish(ins, r, [held, wcopy, n](const Tensor& u) {
        std::vector<Tensor> gs;
        std::vector<double> dw(held->size(), 0.0);
        for (size_t i = 0; i < held->size(); ++i) {
            double s = 0.0;
            for (long long j = 0; j < n; ++j) s += u.at_flat(j) * (*held)[i].at_flat(j);
            dw[i] = s;
        }
        gs.emplace_back(Shape{static_cast<int>(held->size())}, std::move(dw));
        for (size_t i = 0; i < held->size(); ++i) {
            gs.push_back(affine(u, wcopy(static_cast<int>(i)), 0.0));
        }
        return gs;
    });
}

Tensor vecmat(const Tensor& v, const Tensor& w) {
    require_rank(v, 1, "vecmat");
    Tensor m = reshape(v, {1, v.extent(0)});
    Tensor p = matmul(m, w);
    return reshape(p, {p.extent(1)});
}

}  // namespace dcb
