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

#ifndef NFSEC_CONIC_HPP
#define NFSEC_CONIC_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nfsec::conic
{
    enum class ConeKind
    {
        NonNegative,          // dim = number of scalar entries
        SecondOrder,          // dim = cone dimension (>= 2)
        PositiveSemidefinite, // dim = matrix side d; occupies d(d+1)/2 svec entries
    };

    struct ConeBlock
    {
        ConeKind kind;
        int dim;

        int entries() const
        {
            return kind == ConeKind::PositiveSemidefinite ? dim * (dim + 1) / 2 : dim;
        }
    };

    // minimize c'x  s.t.  A x = b,  G x + s = h,  s in K
    // PSD blocks are svec'd real symmetric matrices (off-diagonals scaled by sqrt(2),
    // lower triangle in column-major order).
    struct Problem
    {
        Eigen::VectorXd c;
        Eigen::MatrixXd a;
        Eigen::VectorXd b;
        Eigen::MatrixXd g;
        Eigen::VectorXd h;
        std::vector<ConeBlock> cones;

        int num_vars() const { return static_cast<int>(c.size()); }
        int num_eq() const { return static_cast<int>(b.size()); }
        int cone_entries() const;
        void validate() const; // throws std::invalid_argument
    };

    enum class SolveStatus
    {
        Optimal,
        MaxIterations,
        PrimalInfeasible,
        DualInfeasible,
        NumericalFailure,
    };

    std::string to_string(SolveStatus s);

    struct Solution
    {
        Eigen::VectorXd x, y, z, s;
        double primal_objective = 0.0;
        double dual_objective = 0.0;
        double gap = 0.0;             // <s, z>
        double primal_residual = 0.0; // scaled
        double dual_residual = 0.0;   // scaled
        SolveStatus status = SolveStatus::NumericalFailure;
        int iterations = 0;
    };

    struct SolverOptions
    {
        double tol_feas = 1e-9;
        double tol_gap = 1e-9;
        // a stalled run still counts as optimal when its best iterate meets this
        double accept_tol = 1e-7;
        int max_iterations = 100;
    };

    Solution solve(const Problem &problem, const SolverOptions &options = {});

    // svec/smat for the PSD blocks: <svec(X), svec(Y)> = tr(XY)
    Eigen::VectorXd svec(const Eigen::MatrixXd &sym);
    Eigen::MatrixXd smat(const Eigen::VectorXd &v, int side);
    int svec_index(int row, int col, int side); // row >= col

    // Hermitian H = X + iY -> [[X, -Y], [Y, X]], symmetric 2N x 2N with doubled spectrum
    Eigen::MatrixXd realify(const Eigen::MatrixXcd &hermitian);
}

#endif
