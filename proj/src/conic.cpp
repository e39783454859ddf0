// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field wideband secure beamfocusing library
// Copyright (C) 2026 nfsec contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Primal-dual interior-point method for the cone program
//     min c'x  s.t.  Ax = b,  Gx + s = h,  s in K,
// with K a product of nonnegative, second-order, and (svec'd) PSD cones.
// Nesterov-Todd scaling, Mehrotra predictor-corrector, dense linear algebra
// with per-cone exploitation of the column sparsity of G.

#include "nfsec/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nfsec::conic
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        const double kSqrt2 = std::sqrt(2.0);
    }

    int Problem::cone_entries() const
    {
        int total = 0;
        for (const auto &blk : cones)
            total += blk.entries();
        return total;
    }

    void Problem::validate() const
    {
        const int n = num_vars();
        if (n < 1)
            throw std::invalid_argument("conic: empty variable vector");
        if (g.cols() != n || g.rows() != cone_entries() || h.size() != g.rows())
            throw std::invalid_argument("conic: G/h dimensions inconsistent with the cone list");
        if (num_eq() > 0 && (a.cols() != n || a.rows() != b.size()))
            throw std::invalid_argument("conic: A/b dimensions inconsistent");
        if (cones.empty())
            throw std::invalid_argument("conic: at least one cone block required");
        for (const auto &blk : cones)
        {
            if (blk.dim < 1)
                throw std::invalid_argument("conic: cone dimension must be positive");
            if (blk.kind == ConeKind::SecondOrder && blk.dim < 2)
                throw std::invalid_argument("conic: second-order cone needs dim >= 2");
        }
    }

    std::string to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::PrimalInfeasible: return "primal_infeasible";
        case SolveStatus::DualInfeasible: return "dual_infeasible";
        case SolveStatus::NumericalFailure: return "numerical_failure";
        }
        return "unknown";
    }

    int svec_index(int row, int col, int side)
    {
        // lower triangle, column-major
        return col * side - col * (col - 1) / 2 + (row - col);
    }

    Eigen::VectorXd svec(const Eigen::MatrixXd &sym)
    {
        const int d = static_cast<int>(sym.rows());
        Eigen::VectorXd v(d * (d + 1) / 2);
        int k = 0;
        for (int c = 0; c < d; ++c)
        {
            v(k++) = sym(c, c);
            for (int r = c + 1; r < d; ++r)
                v(k++) = kSqrt2 * sym(r, c);
        }
        return v;
    }

    Eigen::MatrixXd smat(const Eigen::VectorXd &v, int side)
    {
        Eigen::MatrixXd s(side, side);
        int k = 0;
        for (int c = 0; c < side; ++c)
        {
            s(c, c) = v(k++);
            for (int r = c + 1; r < side; ++r)
            {
                s(r, c) = v(k) / kSqrt2;
                s(c, r) = s(r, c);
                ++k;
            }
        }
        return s;
    }

    Eigen::MatrixXd realify(const Eigen::MatrixXcd &hermitian)
    {
        const int n = static_cast<int>(hermitian.rows());
        Eigen::MatrixXd out(2 * n, 2 * n);
        const Eigen::MatrixXd x = hermitian.real();
        const Eigen::MatrixXd y = hermitian.imag();
        out.topLeftCorner(n, n) = x;
        out.bottomRightCorner(n, n) = x;
        out.topRightCorner(n, n) = -y;
        out.bottomLeftCorner(n, n) = y;
        return out;
    }

    namespace
    {
        struct ConeWork
        {
            ConeKind kind;
            int dim;    // side for PSD
            int len;    // entries in s/z
            int offset; // start row in the cone space

            // scaling state
            Eigen::VectorXd w_nn;             // NonNegative: sqrt(s/z)
            double eta = 1.0;                 // SecondOrder
            Eigen::MatrixXd wbar, wbar_inv;   // SecondOrder scaling matrices
            Eigen::MatrixXd r, r_inv;         // PSD
            Eigen::VectorXd lambda;           // scaled point (len entries)
            Eigen::VectorXd lambda_diag;      // PSD eigenvalues (dim entries)

            // column structure of the G block
            std::vector<int> support;                               // variable indices
            std::vector<std::vector<std::pair<int, double>>> cols;  // per support col: (local row, value)
        };

        Eigen::VectorXd cone_identity(const ConeWork &cw)
        {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(cw.len);
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
                e.setOnes();
                break;
            case ConeKind::SecondOrder:
                e(0) = 1.0;
                break;
            case ConeKind::PositiveSemidefinite:
                for (int i = 0; i < cw.dim; ++i)
                    e(svec_index(i, i, cw.dim)) = 1.0;
                break;
            }
            return e;
        }

        double cone_min_eig(const ConeWork &cw, const Eigen::VectorXd &v)
        {
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
                return v.minCoeff();
            case ConeKind::SecondOrder:
                return v(0) - v.tail(cw.len - 1).norm();
            case ConeKind::PositiveSemidefinite:
            {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(v, cw.dim),
                                                                  Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff();
            }
            }
            return 0.0;
        }

        // W acting on a cone-block vector; transposed/inverse variants.
        Eigen::VectorXd apply_w(const ConeWork &cw, const Eigen::VectorXd &v, bool inverse, bool transpose)
        {
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
            {
                if (inverse)
                    return Eigen::VectorXd((v.array() / cw.w_nn.array()).matrix());
                return Eigen::VectorXd((v.array() * cw.w_nn.array()).matrix());
            }
            case ConeKind::SecondOrder:
            {
                // symmetric scaling
                if (inverse)
                    return (cw.wbar_inv * v) / cw.eta;
                return cw.eta * (cw.wbar * v);
            }
            case ConeKind::PositiveSemidefinite:
            {
                const Eigen::MatrixXd m = smat(v, cw.dim);
                Eigen::MatrixXd res;
                if (!inverse && !transpose)
                    res = cw.r.transpose() * m * cw.r; // W v
                else if (!inverse && transpose)
                    res = cw.r * m * cw.r.transpose(); // W^T v
                else if (inverse && !transpose)
                    res = cw.r_inv.transpose() * m * cw.r_inv; // W^-1 v
                else
                    res = cw.r_inv * m * cw.r_inv.transpose(); // W^-T v
                return svec(res);
            }
            }
            return v;
        }

        Eigen::VectorXd jordan_mul(const ConeWork &cw, const Eigen::VectorXd &a, const Eigen::VectorXd &b)
        {
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
                return (a.array() * b.array()).matrix();
            case ConeKind::SecondOrder:
            {
                Eigen::VectorXd out(cw.len);
                out(0) = a.dot(b);
                out.tail(cw.len - 1) = a(0) * b.tail(cw.len - 1) + b(0) * a.tail(cw.len - 1);
                return out;
            }
            case ConeKind::PositiveSemidefinite:
            {
                const Eigen::MatrixXd ma = smat(a, cw.dim);
                const Eigen::MatrixXd mb = smat(b, cw.dim);
                return svec(0.5 * (ma * mb + mb * ma));
            }
            }
            return a;
        }

        // solve lambda o u = d for u, with lambda the current scaled point
        Eigen::VectorXd jordan_solve(const ConeWork &cw, const Eigen::VectorXd &d)
        {
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
                return (d.array() / cw.lambda.array()).matrix();
            case ConeKind::SecondOrder:
            {
                const Eigen::VectorXd &l = cw.lambda;
                const int q = cw.len;
                const double l0 = l(0);
                const double det = l0 * l0 - l.tail(q - 1).squaredNorm();
                Eigen::VectorXd u(q);
                u(0) = (l0 * d(0) - l.tail(q - 1).dot(d.tail(q - 1))) / det;
                u.tail(q - 1) = (d.tail(q - 1) - u(0) * l.tail(q - 1)) / l0;
                return u;
            }
            case ConeKind::PositiveSemidefinite:
            {
                const Eigen::MatrixXd md = smat(d, cw.dim);
                Eigen::MatrixXd mu(cw.dim, cw.dim);
                for (int i = 0; i < cw.dim; ++i)
                    for (int j = 0; j < cw.dim; ++j)
                        mu(i, j) = 2.0 * md(i, j) / (cw.lambda_diag(i) + cw.lambda_diag(j));
                return svec(mu);
            }
            }
            return d;
        }

        // max step alpha with lambda + alpha * dir staying in the cone (lambda interior)
        double step_to_boundary(const ConeWork &cw, const Eigen::VectorXd &dir)
        {
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
            {
                double amax = kInf;
                for (int i = 0; i < cw.len; ++i)
                    if (dir(i) < 0.0)
                        amax = std::min(amax, -cw.lambda(i) / dir(i));
                return amax;
            }
            case ConeKind::SecondOrder:
            {
                // exit of lambda + alpha d from {v0 >= ||v1||}; the feasible alpha set is an interval
                const Eigen::VectorXd &l = cw.lambda;
                const int q = cw.len;
                const double a2 = dir(0) * dir(0) - dir.tail(q - 1).squaredNorm();
                const double a1 = l(0) * dir(0) - l.tail(q - 1).dot(dir.tail(q - 1));
                const double a0 = l(0) * l(0) - l.tail(q - 1).squaredNorm();
                double amax = kInf;
                if (dir(0) < 0.0)
                    amax = -l(0) / dir(0);
                // roots of a2 t^2 + 2 a1 t + a0 = 0
                const double disc = a1 * a1 - a2 * a0;
                if (disc >= 0.0)
                {
                    const double sq = std::sqrt(disc);
                    for (double root : {(-a1 - sq), (-a1 + sq)})
                    {
                        if (std::abs(a2) < 1e-300)
                            continue;
                        const double t = root / a2;
                        if (t > 0.0 && l(0) + t * dir(0) >= 0.0)
                            amax = std::min(amax, t);
                    }
                    if (std::abs(a2) < 1e-300 && a1 < 0.0)
                        amax = std::min(amax, -a0 / (2.0 * a1));
                }
                return amax;
            }
            case ConeKind::PositiveSemidefinite:
            {
                // max alpha with Lambda + alpha D >= 0, Lambda = diag(lambda_diag) > 0
                Eigen::MatrixXd m = smat(dir, cw.dim);
                for (int i = 0; i < cw.dim; ++i)
                    for (int j = 0; j < cw.dim; ++j)
                        m(i, j) /= std::sqrt(cw.lambda_diag(i) * cw.lambda_diag(j));
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
                const double emin = es.eigenvalues().minCoeff();
                return emin >= 0.0 ? kInf : -1.0 / emin;
            }
            }
            return kInf;
        }

        // Nesterov-Todd scaling from interior s, z; returns false when the
        // factorizations degenerate (iterate left the interior numerically).
        bool compute_scaling(ConeWork &cw, const Eigen::VectorXd &s, const Eigen::VectorXd &z)
        {
            switch (cw.kind)
            {
            case ConeKind::NonNegative:
            {
                if ((s.array() <= 0.0).any() || (z.array() <= 0.0).any())
                    return false;
                cw.w_nn = (s.array() / z.array()).sqrt().matrix();
                cw.lambda = (s.array() * z.array()).sqrt().matrix();
                return true;
            }
            case ConeKind::SecondOrder:
            {
                const int q = cw.len;
                const double sres2 = s(0) * s(0) - s.tail(q - 1).squaredNorm();
                const double zres2 = z(0) * z(0) - z.tail(q - 1).squaredNorm();
                if (sres2 <= 0.0 || zres2 <= 0.0 || s(0) <= 0.0 || z(0) <= 0.0)
                    return false;
                const double sres = std::sqrt(sres2);
                const double zres = std::sqrt(zres2);
                Eigen::VectorXd sb = s / sres, zb = z / zres;
                const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
                // normalized NT point v (v'Jv = 1) and its Jordan half-angle u;
                // the scaling is P(u) = 2uu' - J scaled by eta
                Eigen::VectorXd v(q);
                v(0) = (sb(0) + zb(0)) / (2.0 * gamma);
                v.tail(q - 1) = (sb.tail(q - 1) - zb.tail(q - 1)) / (2.0 * gamma);
                Eigen::VectorXd u = v;
                u(0) += 1.0;
                u /= std::sqrt(2.0 * (v(0) + 1.0));
                cw.eta = std::sqrt(sres / zres);
                Eigen::MatrixXd jmat = -Eigen::MatrixXd::Identity(q, q);
                jmat(0, 0) = 1.0;
                cw.wbar = 2.0 * u * u.transpose() - jmat;
                Eigen::VectorXd ju = -u;
                ju(0) = u(0);
                cw.wbar_inv = 2.0 * ju * ju.transpose() - jmat;
                cw.lambda = cw.eta * (cw.wbar * z);
                return true;
            }
            case ConeKind::PositiveSemidefinite:
            {
                // any square factor F with M = F F' works for the NT construction;
                // fall back to an eigenvalue-clamped factor when Cholesky degenerates
                auto psd_factor = [](const Eigen::MatrixXd &m, Eigen::MatrixXd &out) {
                    Eigen::LLT<Eigen::MatrixXd> llt(m);
                    if (llt.info() == Eigen::Success)
                    {
                        out = llt.matrixL();
                        return true;
                    }
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
                    if (es.info() != Eigen::Success)
                        return false;
                    const double emax = es.eigenvalues().maxCoeff();
                    if (emax <= 0.0)
                        return false;
                    const double floor_val = 1e-14 * emax;
                    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor_val);
                    out = es.eigenvectors() * ev.array().sqrt().matrix().asDiagonal();
                    return true;
                };
                const Eigen::MatrixXd ms = smat(s, cw.dim);
                const Eigen::MatrixXd mz = smat(z, cw.dim);
                Eigen::MatrixXd lsm, lzm;
                if (!psd_factor(ms, lsm) || !psd_factor(mz, lzm))
                    return false;
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(lzm.transpose() * lsm,
                                                      Eigen::ComputeFullU | Eigen::ComputeFullV);
                const Eigen::VectorXd sig = svd.singularValues();
                if (sig.minCoeff() <= 0.0)
                    return false;
                const Eigen::VectorXd si = sig.array().sqrt().inverse().matrix();
                cw.r = lsm * svd.matrixV() * si.asDiagonal();
                cw.r_inv = si.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
                cw.lambda_diag = sig;
                Eigen::VectorXd lam = Eigen::VectorXd::Zero(cw.len);
                for (int i = 0; i < cw.dim; ++i)
                    lam(svec_index(i, i, cw.dim)) = sig(i);
                cw.lambda = lam;
                return true;
            }
            }
            return false;
        }

        struct KktFactors
        {
            Eigen::LLT<Eigen::MatrixXd> h_chol;
            Eigen::LLT<Eigen::MatrixXd> schur_chol; // A H^-1 A'
            Eigen::MatrixXd h;                      // kept for refinement
            bool has_eq = false;
        };

        class Ipm
        {
        public:
            Ipm(const Problem &prob, const SolverOptions &opt) : p_(prob), opt_(opt)
            {
                n_ = p_.num_vars();
                peq_ = p_.num_eq();
                mlen_ = p_.cone_entries();
                int off = 0;
                for (const auto &blk : p_.cones)
                {
                    ConeWork cw;
                    cw.kind = blk.kind;
                    cw.dim = blk.dim;
                    cw.len = blk.entries();
                    cw.offset = off;
                    off += cw.len;
                    cones_.push_back(std::move(cw));
                }
                degree_ = 0;
                for (const auto &cw : cones_)
                    degree_ += (cw.kind == ConeKind::NonNegative) ? cw.len
                             : (cw.kind == ConeKind::SecondOrder) ? 1
                                                                  : cw.dim;
                build_column_structure();
            }

            Solution run();

        private:
            void build_column_structure()
            {
                for (auto &cw : cones_)
                {
                    std::vector<std::vector<std::pair<int, double>>> cols;
                    std::vector<int> support;
                    for (int j = 0; j < n_; ++j)
                    {
                        std::vector<std::pair<int, double>> triplets;
                        for (int r = 0; r < cw.len; ++r)
                        {
                            const double v = p_.g(cw.offset + r, j);
                            if (v != 0.0)
                                triplets.emplace_back(r, v);
                        }
                        if (!triplets.empty())
                        {
                            support.push_back(j);
                            cols.push_back(std::move(triplets));
                        }
                    }
                    cw.support = std::move(support);
                    cw.cols = std::move(cols);
                }
            }

            // H = G' (W'W)^-1 G accumulated per cone over its column support;
            // the scaled blocks W^-T G are cached for the direction solves.
            Eigen::MatrixXd build_h()
            {
                Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_, n_);
                bt_cache_.assign(cones_.size(), Eigen::MatrixXd());
                for (size_t ci = 0; ci < cones_.size(); ++ci)
                {
                    const auto &cw = cones_[ci];
                    const int k = static_cast<int>(cw.support.size());
                    if (k == 0)
                        continue;
                    Eigen::MatrixXd &bt = bt_cache_[ci];
                    bt.resize(cw.len, k);
                    for (int jc = 0; jc < k; ++jc)
                        bt.col(jc) = scaled_column(cw, cw.cols[static_cast<size_t>(jc)]);
                    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
                    gram.selfadjointView<Eigen::Lower>().rankUpdate(bt.transpose());
                    for (int aa = 0; aa < k; ++aa)
                    {
                        const int ia = cw.support[static_cast<size_t>(aa)];
                        h(ia, ia) += gram(aa, aa);
                        for (int bb = 0; bb < aa; ++bb)
                        {
                            const int ib = cw.support[static_cast<size_t>(bb)];
                            h(ia, ib) += gram(aa, bb);
                            h(ib, ia) += gram(aa, bb);
                        }
                    }
                }
                return h;
            }

            // W^-T applied to a sparse cone-block column
            Eigen::VectorXd scaled_column(const ConeWork &cw,
                                          const std::vector<std::pair<int, double>> &triplets) const
            {
                switch (cw.kind)
                {
                case ConeKind::NonNegative:
                {
                    Eigen::VectorXd out = Eigen::VectorXd::Zero(cw.len);
                    for (const auto &[r, v] : triplets)
                        out(r) = v / cw.w_nn(r);
                    return out;
                }
                case ConeKind::SecondOrder:
                {
                    Eigen::VectorXd col = Eigen::VectorXd::Zero(cw.len);
                    for (const auto &[r, v] : triplets)
                        col(r) = v;
                    return (cw.wbar_inv * col) / cw.eta;
                }
                case ConeKind::PositiveSemidefinite:
                {
                    // R^-1 mat(col) R^-T via rank-2 outer products of R^-1 columns
                    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(cw.dim, cw.dim);
                    for (const auto &[idx, v] : triplets)
                    {
                        // invert svec index -> (row, col)
                        int c = 0;
                        int rem = idx;
                        while (rem >= cw.dim - c)
                        {
                            rem -= cw.dim - c;
                            ++c;
                        }
                        const int r = c + rem;
                        const Eigen::VectorXd qr = cw.r_inv.col(r);
                        if (r == c)
                            acc += v * qr * qr.transpose();
                        else
                        {
                            const Eigen::VectorXd qc = cw.r_inv.col(c);
                            const double scaled = v / kSqrt2;
                            acc += scaled * (qr * qc.transpose() + qc * qr.transpose());
                        }
                    }
                    return svec(acc);
                }
                }
                return Eigen::VectorXd::Zero(cw.len);
            }

            Eigen::VectorXd apply_w_full(const Eigen::VectorXd &v, bool inverse, bool transpose) const
            {
                Eigen::VectorXd out(mlen_);
                for (const auto &cw : cones_)
                    out.segment(cw.offset, cw.len) = apply_w(cw, v.segment(cw.offset, cw.len), inverse, transpose);
                return out;
            }

            KktFactors factor(const Eigen::MatrixXd &h_in) const
            {
                KktFactors f;
                f.h = h_in;
                const double scale = std::max(1.0, f.h.diagonal().maxCoeff());
                double reg = 1e-14 * scale;
                for (int attempt = 0; attempt < 6; ++attempt)
                {
                    Eigen::MatrixXd hr = f.h + reg * Eigen::MatrixXd::Identity(n_, n_);
                    f.h_chol.compute(hr);
                    if (f.h_chol.info() == Eigen::Success)
                    {
                        if (peq_ > 0)
                        {
                            Eigen::MatrixXd hiat = f.h_chol.solve(p_.a.transpose());
                            Eigen::MatrixXd schur = p_.a * hiat;
                            f.schur_chol.compute(schur);
                            if (f.schur_chol.info() != Eigen::Success)
                            {
                                reg *= 100.0;
                                continue;
                            }
                            f.has_eq = true;
                        }
                        return f;
                    }
                    reg *= 100.0;
                }
                throw std::runtime_error("conic: KKT factorization failed");
            }

            // [[H, A'],[A, 0]] (dx, dy) = (r1, r2), with one refinement pass
            void solve_kkt(const KktFactors &f, const Eigen::VectorXd &r1, const Eigen::VectorXd &r2,
                           Eigen::VectorXd &dx, Eigen::VectorXd &dy) const
            {
                auto solve_once = [&](const Eigen::VectorXd &q1, const Eigen::VectorXd &q2,
                                      Eigen::VectorXd &ox, Eigen::VectorXd &oy) {
                    if (f.has_eq)
                    {
                        Eigen::VectorXd t = f.h_chol.solve(q1);
                        oy = f.schur_chol.solve(p_.a * t - q2);
                        ox = f.h_chol.solve(q1 - p_.a.transpose() * oy);
                    }
                    else
                    {
                        ox = f.h_chol.solve(q1);
                        oy.resize(0);
                    }
                };
                solve_once(r1, r2, dx, dy);
                // refinement against the unregularized operator
                Eigen::VectorXd res1 = r1 - f.h * dx;
                if (f.has_eq)
                    res1 -= p_.a.transpose() * dy;
                Eigen::VectorXd res2 = f.has_eq ? Eigen::VectorXd(r2 - p_.a * dx) : Eigen::VectorXd();
                Eigen::VectorXd cx, cy;
                solve_once(res1, res2, cx, cy);
                dx += cx;
                if (f.has_eq)
                    dy += cy;
            }

            struct Direction
            {
                Eigen::VectorXd dx, dy, dz, ds;
            };

            Direction direction(const KktFactors &f, const Eigen::VectorXd &rd,
                                const Eigen::VectorXd &rp, const Eigen::VectorXd &rg,
                                const Eigen::VectorXd &u) const
            {
                Direction d;
                Eigen::VectorXd wu = apply_w_full(u, false, true);           // W' u
                Eigen::VectorXd rhs_cone = rg + wu;                          // rg + W'u
                Eigen::VectorXd tmp = apply_w_full(rhs_cone, true, true);    // W^-T (...)
                Eigen::VectorXd gw = Eigen::VectorXd::Zero(n_);
                // G' (W'W)^-1 (...) = (W^-T G)' W^-T (...), using the cached scaled blocks
                for (size_t ci = 0; ci < cones_.size(); ++ci)
                {
                    const auto &cw = cones_[ci];
                    const int k = static_cast<int>(cw.support.size());
                    if (k == 0)
                        continue;
                    Eigen::VectorXd contrib = bt_cache_[ci].transpose() * tmp.segment(cw.offset, cw.len);
                    for (int jc = 0; jc < k; ++jc)
                        gw(cw.support[static_cast<size_t>(jc)]) += contrib(jc);
                }
                const Eigen::VectorXd r1 = -rd - gw;
                const Eigen::VectorXd r2 = -rp;
                solve_kkt(f, r1, r2, d.dx, d.dy);
                d.dz = apply_w_full(apply_w_full(p_.g * d.dx + rhs_cone, true, true), true, false);
                d.ds = -rg - p_.g * d.dx;
                return d;
            }

            double boundary_step(const Eigen::VectorXd &ds, const Eigen::VectorXd &dz) const
            {
                double amax = kInf;
                for (const auto &cw : cones_)
                {
                    const Eigen::VectorXd dst = apply_w(cw, ds.segment(cw.offset, cw.len), true, true); // W^-T ds
                    const Eigen::VectorXd dzt = apply_w(cw, dz.segment(cw.offset, cw.len), false, false); // W dz
                    amax = std::min(amax, step_to_boundary(cw, dst));
                    amax = std::min(amax, step_to_boundary(cw, dzt));
                }
                return amax;
            }

            bool in_interior(const Eigen::VectorXd &v) const
            {
                for (const auto &cw : cones_)
                    if (cone_min_eig(cw, v.segment(cw.offset, cw.len)) <= 0.0)
                        return false;
                return true;
            }

            const Problem &p_;
            SolverOptions opt_;
            int n_ = 0, peq_ = 0, mlen_ = 0;
            double degree_ = 0.0;
            std::vector<ConeWork> cones_;
            std::vector<Eigen::MatrixXd> bt_cache_; // per-cone W^-T G blocks of this iteration
        };

        Solution Ipm::run()
        {
            Solution sol;
            sol.status = SolveStatus::MaxIterations;

            // ---- initialization: least-squares primal/dual points, shifted inside K
            Eigen::VectorXd x, y, s, z;
            {
                Eigen::MatrixXd h0 = p_.g.transpose() * p_.g;
                KktFactors f0 = factor(h0);
                Eigen::VectorXd dy;
                solve_kkt(f0, p_.g.transpose() * p_.h, p_.b, x, dy);
                Eigen::VectorXd shat = p_.h - p_.g * x;
                s = shat;
                for (const auto &cw : cones_)
                {
                    auto seg = s.segment(cw.offset, cw.len);
                    const double me = cone_min_eig(cw, seg);
                    if (me <= 0.0)
                        seg += (1.0 - me) * cone_identity(cw);
                }

                Eigen::VectorXd xd;
                solve_kkt(f0, -p_.c, Eigen::VectorXd::Zero(peq_), xd, y);
                z = p_.g * xd;
                for (const auto &cw : cones_)
                {
                    auto seg = z.segment(cw.offset, cw.len);
                    const double me = cone_min_eig(cw, seg);
                    if (me <= 0.0)
                        seg += (1.0 - me) * cone_identity(cw);
                }
                if (peq_ == 0)
                    y.resize(0);
            }

            const double resx0 = std::max(1.0, p_.c.norm());
            const double resy0 = std::max(1.0, peq_ > 0 ? p_.b.norm() : 0.0);
            const double resz0 = std::max(1.0, p_.h.norm());

            double best_score = kInf;
            int stall_count = 0;
            auto record = [&](double pres, double dres, double relgap, int iter) {
                const double score = std::max({pres, dres, relgap});
                if (score < 0.9 * best_score)
                    stall_count = 0;
                else
                    ++stall_count;
                if (score < best_score)
                {
                    best_score = score;
                    sol.x = x;
                    sol.y = y;
                    sol.z = z;
                    sol.s = s;
                    sol.primal_objective = p_.c.dot(x);
                    sol.dual_objective = -(peq_ > 0 ? p_.b.dot(y) : 0.0) - p_.h.dot(z);
                    sol.gap = s.dot(z);
                    sol.primal_residual = pres;
                    sol.dual_residual = dres;
                    sol.iterations = iter;
                }
            };

            for (int iter = 0; iter <= opt_.max_iterations; ++iter)
            {
                Eigen::VectorXd rd = p_.c + p_.g.transpose() * z;
                if (peq_ > 0)
                    rd += p_.a.transpose() * y;
                Eigen::VectorXd rp = peq_ > 0 ? Eigen::VectorXd(p_.a * x - p_.b) : Eigen::VectorXd();
                Eigen::VectorXd rg = p_.g * x + s - p_.h;

                const double gap = s.dot(z);
                const double mu = gap / degree_;
                const double pcost = p_.c.dot(x);
                const double dcost = -(peq_ > 0 ? p_.b.dot(y) : 0.0) - p_.h.dot(z);
                const double pres = std::max(peq_ > 0 ? rp.norm() / resy0 : 0.0, rg.norm() / resz0);
                const double dres = rd.norm() / resx0;
                const double relgap = std::abs(gap) / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

                record(pres, dres, relgap, iter);

                if (pres <= opt_.tol_feas && dres <= opt_.tol_feas && relgap <= opt_.tol_gap)
                {
                    sol.status = SolveStatus::Optimal;
                    return sol;
                }

                // infeasibility certificates
                {
                    const double denom_p = -((peq_ > 0 ? p_.b.dot(y) : 0.0) + p_.h.dot(z));
                    if (denom_p > 0.0)
                    {
                        Eigen::VectorXd cert = p_.g.transpose() * z;
                        if (peq_ > 0)
                            cert += p_.a.transpose() * y;
                        if (cert.norm() / denom_p <= 1e-12 * resx0 && mu <= 1e-10)
                        {
                            sol.status = SolveStatus::PrimalInfeasible;
                            return sol;
                        }
                    }
                    const double denom_d = -pcost;
                    if (denom_d > 0.0)
                    {
                        const double nx = (peq_ > 0 ? (p_.a * x).norm() : 0.0) + (p_.g * x + s).norm();
                        if (nx / denom_d <= 1e-12 && mu <= 1e-10)
                        {
                            sol.status = SolveStatus::DualInfeasible;
                            return sol;
                        }
                    }
                }

                if (iter == opt_.max_iterations || stall_count >= 10)
                    break;

                bool scaled = true;
                for (auto &cw : cones_)
                    if (!compute_scaling(cw, s.segment(cw.offset, cw.len), z.segment(cw.offset, cw.len)))
                    {
                        scaled = false;
                        break;
                    }
                if (!scaled)
                {
                    sol.status = best_score <= opt_.accept_tol ? SolveStatus::Optimal
                                                               : SolveStatus::NumericalFailure;
                    return sol;
                }

                KktFactors f;
                try
                {
                    f = factor(build_h());
                }
                catch (const std::runtime_error &)
                {
                    sol.status = best_score <= opt_.accept_tol ? SolveStatus::Optimal
                                                               : SolveStatus::NumericalFailure;
                    return sol;
                }

                Eigen::VectorXd lambda_full(mlen_);
                for (const auto &cw : cones_)
                    lambda_full.segment(cw.offset, cw.len) = cw.lambda;

                // affine (predictor) direction: u = -lambda
                Direction aff = direction(f, rd, rp, rg, -lambda_full);
                const double alpha_aff = std::min(1.0, boundary_step(aff.ds, aff.dz));
                const double mu_aff =
                    (s + alpha_aff * aff.ds).dot(z + alpha_aff * aff.dz) / degree_;
                double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
                sigma = std::min(1.0, std::max(1e-8, sigma));

                // combined direction with Mehrotra correction; retry with heavier
                // centering when the step collapses
                Direction dir;
                double alpha = 0.0;
                for (int attempt = 0; attempt < 2; ++attempt)
                {
                    Eigen::VectorXd dcomp(mlen_);
                    for (const auto &cw : cones_)
                    {
                        const Eigen::VectorXd dst = apply_w(cw, aff.ds.segment(cw.offset, cw.len), true, true);
                        const Eigen::VectorXd dzt = apply_w(cw, aff.dz.segment(cw.offset, cw.len), false, false);
                        dcomp.segment(cw.offset, cw.len) =
                            -jordan_mul(cw, cw.lambda, cw.lambda) - jordan_mul(cw, dst, dzt) +
                            sigma * mu * cone_identity(cw);
                    }
                    Eigen::VectorXd u(mlen_);
                    for (const auto &cw : cones_)
                        u.segment(cw.offset, cw.len) = jordan_solve(cw, dcomp.segment(cw.offset, cw.len));

                    dir = direction(f, rd, rp, rg, u);
                    alpha = 0.99 * std::min(1.0 / 0.99, boundary_step(dir.ds, dir.dz));
                    alpha = std::min(1.0, alpha);

                    // keep strictly inside despite roundoff
                    for (int back = 0; back < 12; ++back)
                    {
                        if (in_interior(s + alpha * dir.ds) && in_interior(z + alpha * dir.dz))
                            break;
                        alpha *= 0.8;
                    }
                    if (alpha >= 0.05 || sigma >= 0.5)
                        break;
                    sigma = 0.8;
                }

                x += alpha * dir.dx;
                if (peq_ > 0)
                    y += alpha * dir.dy;
                s += alpha * dir.ds;
                z += alpha * dir.dz;
            }

            if (best_score <= opt_.accept_tol)
                sol.status = SolveStatus::Optimal;
            return sol;
        }
    }

    Solution solve(const Problem &problem, const SolverOptions &options)
    {
        problem.validate();
        Ipm ipm(problem, options);
        return ipm.run();
    }
}
