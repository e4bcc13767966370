#pragma once

#include <cstddef>

namespace tplab::kernels {

/// Instruction set used by the batch kernels. Chosen once at first use from
/// the running CPU; TPLAB_ISA=scalar in the environment forces the reference.
enum class Isa { scalar, avx2, neon };

Isa active_isa();
const char* isa_name(Isa isa);
/// Test hook: pin the dispatch target. Returns false if unsupported here.
bool force_isa(Isa isa);
void reset_isa();
bool isa_supported(Isa isa);

// Extremal evaluation of 2x2 symmetric matrices (a11, a12, a22):
// out = sum over eigenvalues e of (e > 0 ? wpos : wneg) * e.
// Pucci+ is (Lambda, lambda), Pucci- is (lambda, Lambda), trace is (1, 1).
void pucci2_scalar(const double* a11, const double* a12, const double* a22, double* out,
                   std::size_t len, double wpos, double wneg);
void pucci2_avx2(const double* a11, const double* a12, const double* a22, double* out,
                 std::size_t len, double wpos, double wneg);
void pucci2_neon(const double* a11, const double* a12, const double* a22, double* out,
                 std::size_t len, double wpos, double wneg);
void pucci2(const double* a11, const double* a12, const double* a22, double* out,
            std::size_t len, double wpos, double wneg);

// Explicit Euler update of a contiguous run of 1D interior nodes:
// out[i] = u[i] + dt * (F(D_i) + f[i]), D_i = (u[i-1] - 2 u[i] + u[i+1]) * inv_h2,
// F(D) = (D > 0 ? wpos : wneg) * D. u[-1] and u[len] must be readable.
void row1_scalar(const double* u, const double* f, double* out, std::size_t len,
                 double inv_h2, double dt, double wpos, double wneg);
void row1_avx2(const double* u, const double* f, double* out, std::size_t len,
               double inv_h2, double dt, double wpos, double wneg);
void row1_neon(const double* u, const double* f, double* out, std::size_t len,
               double inv_h2, double dt, double wpos, double wneg);
void row1(const double* u, const double* f, double* out, std::size_t len,
          double inv_h2, double dt, double wpos, double wneg);

}  // namespace tplab::kernels
