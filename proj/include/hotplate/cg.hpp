#pragma once

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hotplate/error.hpp"

namespace hotplate {

/// Compressed sparse rows, symmetric positive definite by construction.
struct Csr {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;
};

namespace detail {

// Reductions are accumulated per fixed-size chunk and the chunk sums added in
// index order, so results are bit-identical for any worker count.
constexpr std::size_t kChunk = 4096;

/// Minimal persistent worker pool for data-parallel ranges.
class WorkerPool {
public:
    explicit WorkerPool(int workers) {
        for (int i = 1; i < workers; ++i)
            threads_.emplace_back([this, i] { worker(i); });
        count_ = workers < 1 ? 1 : workers;
    }

    ~WorkerPool() {
        {
            std::unique_lock lk(mu_);
            stop_ = true;
            ++generation_;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    /// Run fn(begin,end) over [0,n) split across workers; blocks until done.
    void run(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
        if (count_ == 1 || n < 2 * kChunk) {
            fn(0, n);
            return;
        }
        {
            std::unique_lock lk(mu_);
            job_ = &fn;
            job_n_ = n;
            pending_ = count_ - 1;
            ++generation_;
        }
        cv_.notify_all();
        run_slice(0, n, 0);
        std::unique_lock lk(mu_);
        done_cv_.wait(lk, [this] { return pending_ == 0; });
        job_ = nullptr;
    }

    int size() const { return count_; }

private:
    void run_slice(std::size_t /*begin*/, std::size_t n, int rank) const {
        std::size_t per = (n + count_ - 1) / count_;
        std::size_t lo = std::min<std::size_t>(rank * per, n);
        std::size_t hi = std::min<std::size_t>(lo + per, n);
        if (lo < hi) (*job_)(lo, hi);
    }

    void worker(int rank) {
        std::uint64_t last_gen = 0;
        for (;;) {
            const std::function<void(std::size_t, std::size_t)>* job = nullptr;
            std::size_t n = 0;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return generation_ != last_gen; });
                last_gen = generation_;
                if (stop_) return;
                job = job_;
                n = job_n_;
            }
            if (job) {
                std::size_t per = (n + count_ - 1) / count_;
                std::size_t lo = std::min<std::size_t>(rank * per, n);
                std::size_t hi = std::min<std::size_t>(lo + per, n);
                if (lo < hi) (*job)(lo, hi);
                std::unique_lock lk(mu_);
                if (--pending_ == 0) done_cv_.notify_all();
            }
        }
    }

    std::vector<std::thread> threads_;
    int count_ = 1;
    mutable std::mutex mu_;
    std::condition_variable cv_, done_cv_;
    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t job_n_ = 0;
    int pending_ = 0;
    bool stop_ = false;
    std::uint64_t generation_ = 0;
};

/// Chunked dot product: identical result regardless of thread count.
inline double det_dot(std::span<const double> a, std::span<const double> b,
                      WorkerPool& pool, std::vector<double>& chunk_buf) {
    std::size_t n = a.size();
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    chunk_buf.assign(chunks, 0.0);
    pool.run(chunks, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            std::size_t lo = c * kChunk;
            std::size_t hi = std::min(lo + kChunk, n);
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
            chunk_buf[c] = s;
        }
    });
    double sum = 0.0;
    for (double s : chunk_buf) sum += s;
    return sum;
}

}  // namespace detail

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

struct CgOptions {
    double tol = 1e-9;    // relative residual on the preconditioned system
    int max_iters = 0;    // 0 = 50 * sqrt(n)
    int threads = 1;
};

/// Jacobi-preconditioned conjugate gradients. Deterministic: fixed iteration
/// order and chunked reductions make serial and threaded runs bit-identical.
inline CgResult pcg_jacobi(const Csr& A, std::span<const double> b,
                           std::vector<double>& x, const CgOptions& opt = {}) {
    const std::size_t n = A.rows;
    x.assign(n, 0.0);
    if (n == 0) return {0, 0.0};

    int max_iters = opt.max_iters > 0
                        ? opt.max_iters
                        : static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))) + 10;

    std::vector<double> inv_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t idx = A.row_ptr[i]; idx < A.row_ptr[i + 1]; ++idx)
            if (A.col[idx] == i) d = A.val[idx];
        if (!(d > 0.0))
            throw solver_error("system is singular: non-positive diagonal at row " +
                               std::to_string(i));
        inv_diag[i] = 1.0 / d;
    }

    detail::WorkerPool pool(opt.threads);
    std::vector<double> chunk_buf;
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), Ap(n);

    auto apply_precond = [&](const std::vector<double>& in, std::vector<double>& out) {
        pool.run(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) out[i] = inv_diag[i] * in[i];
        });
    };
    auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
        pool.run(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                double s = 0.0;
                for (std::size_t idx = A.row_ptr[i]; idx < A.row_ptr[i + 1]; ++idx)
                    s += A.val[idx] * in[A.col[idx]];
                out[i] = s;
            }
        });
    };

    apply_precond(r, z);
    p = z;
    double rz = detail::det_dot(r, z, pool, chunk_buf);
    const double rz0 = rz;
    if (!(rz0 > 0.0)) return {0, 0.0};  // zero right-hand side

    for (int it = 1; it <= max_iters; ++it) {
        matvec(p, Ap);
        double pAp = detail::det_dot(p, Ap, pool, chunk_buf);
        if (!(pAp > 0.0))
            throw solver_error("conjugate gradient breakdown: matrix not SPD");
        double alpha = rz / pAp;
        pool.run(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
        });
        apply_precond(r, z);
        double rz_new = detail::det_dot(r, z, pool, chunk_buf);
        double rel = std::sqrt(std::max(rz_new, 0.0) / rz0);
        if (rel <= opt.tol) return {it, rel};
        double beta = rz_new / rz;
        rz = rz_new;
        pool.run(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) p[i] = z[i] + beta * p[i];
        });
    }
    throw solver_error("conjugate gradient did not converge within " +
                       std::to_string(max_iters) + " iterations");
}

}  // namespace hotplate
