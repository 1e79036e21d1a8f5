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

#ifndef IRSMSE_LINALG_HPP
#define IRSMSE_LINALG_HPP

#include "irsmse/core_model.hpp"

namespace irsmse::linalg
{
    /// Solves A X = B for Hermitian positive-definite A (Cholesky; LDLT fallback).
    CMatrix hpd_solve(const CMatrix &A, const CMatrix &B);

    /// tr(A^{-1}) for Hermitian positive-definite A.
    double hpd_trace_inverse(const CMatrix &A);

    /// log2 det(A) for Hermitian positive-definite A.
    double hpd_log2_det(const CMatrix &A);

    /// Hermitian principal square root A^{1/2} and inverse root A^{-1/2}.
    CMatrix hermitian_sqrt(const CMatrix &A);
    CMatrix hermitian_inv_sqrt(const CMatrix &A);

    /// Symmetrizes (A + A^*) / 2.
    CMatrix hermitian_part(const CMatrix &A);

    bool is_hermitian(const CMatrix &A, double tol);

    /// Kronecker product A (x) B.
    CMatrix kron(const CMatrix &A, const CMatrix &B);

    /// Unitary DFT matrix F / sqrt(n), F(a,b) = exp(-j 2 pi a b / n).
    CMatrix unitary_dft(int n);
}

#endif
