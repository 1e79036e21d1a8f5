// SPDX-License-Identifier: Apache-2.0
//
// irsmse: robust MSE transceiver design for wideband IRS-aided multiuser MIMO
// Copyright (C) 2026 The irsmse authors
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

#include "irsmse/linalg.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace irsmse::linalg
{
    CMatrix hpd_solve(const CMatrix &A, const CMatrix &B)
    {
        Eigen::LLT<CMatrix> llt(A);
        if (llt.info() == Eigen::Success)
            return llt.solve(B);
        return A.ldlt().solve(B);
    }

    double hpd_trace_inverse(const CMatrix &A)
    {
        const CMatrix inv = hpd_solve(A, CMatrix::Identity(A.rows(), A.cols()));
        return inv.trace().real();
    }

    double hpd_log2_det(const CMatrix &A)
    {
        Eigen::LLT<CMatrix> llt(A);
        if (llt.info() == Eigen::Success)
        {
            double acc = 0.0;
            const CMatrix &L = llt.matrixLLT();
            for (Eigen::Index i = 0; i < A.rows(); ++i)
                acc += std::log2(L(i, i).real());
            return 2.0 * acc;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            acc += std::log2(es.eigenvalues()(i));
        return acc;
    }

    namespace
    {
        CMatrix spectral_power(const CMatrix &A, double exponent)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(A));
            Eigen::VectorXd ev = es.eigenvalues();
            for (Eigen::Index i = 0; i < ev.size(); ++i)
                ev(i) = std::pow(std::max(ev(i), 0.0), exponent);
            const CMatrix &U = es.eigenvectors();
            return U * ev.cast<cplx>().asDiagonal() * U.adjoint();
        }

        bool is_scaled_identity(const CMatrix &A)
        {
            if (A.rows() != A.cols())
                return false;
            const cplx d = A(0, 0);
            for (Eigen::Index c = 0; c < A.cols(); ++c)
                for (Eigen::Index r = 0; r < A.rows(); ++r)
                    if (A(r, c) != (r == c ? d : cplx(0.0)))
                        return false;
            return d.imag() == 0.0 && d.real() > 0.0;
        }
    }

    CMatrix hermitian_sqrt(const CMatrix &A)
    {
        if (A.size() > 0 && is_scaled_identity(A))
            return std::sqrt(A(0, 0).real()) * CMatrix::Identity(A.rows(), A.cols());
        return spectral_power(A, 0.5);
    }

    CMatrix hermitian_inv_sqrt(const CMatrix &A)
    {
        if (A.size() > 0 && is_scaled_identity(A))
            return (1.0 / std::sqrt(A(0, 0).real())) * CMatrix::Identity(A.rows(), A.cols());
        return spectral_power(A, -0.5);
    }

    CMatrix hermitian_part(const CMatrix &A)
    {
        return 0.5 * (A + A.adjoint());
    }

    bool is_hermitian(const CMatrix &A, double tol)
    {
        if (A.rows() != A.cols())
            return false;
        const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
        return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
    }

    CMatrix kron(const CMatrix &A, const CMatrix &B)
    {
        CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            for (Eigen::Index r = 0; r < A.rows(); ++r)
                out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
        return out;
    }

    CMatrix unitary_dft(int n)
    {
        CMatrix F(n, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
            {
                // Reduce a*b mod n first so large orders keep exact unit-modulus phases.
                const double phase = -2.0 * std::numbers::pi * static_cast<double>((a * b) % n) / n;
                F(a, b) = std::polar(scale, phase);
            }
        return F;
    }
}
