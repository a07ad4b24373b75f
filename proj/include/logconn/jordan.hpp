#pragma once

// Jordan-Chevalley decompositions built on the clustered spectral data:
// additive M = S + N, multiplicative M = Ms * Mu, and the real/imaginary
// split of a semisimple matrix into commuting real-semisimple parts.

#include <cmath>

#include "logconn/errors.hpp"
#include "logconn/spectral.hpp"
#include "logconn/types.hpp"

namespace logconn {

struct AdditiveJC {
    CMatrix S;  // semisimple part
    CMatrix N;  // nilpotent part, commutes with S
};

struct MultiplicativeJC {
    CMatrix Ms;  // semisimple factor
    CMatrix Mu;  // unipotent factor, commutes with Ms
};

struct RealImagSplit {
    CMatrix a;  // real-semisimple, real spectrum
    CMatrix b;  // real-semisimple, real spectrum; S = a + i b
};

inline AdditiveJC additive_jc(const CMatrix& M, double tol = default_tol) {
    SpectralData sd = spectral_decompose(M, tol);
    AdditiveJC jc;
    jc.S = CMatrix::Zero(M.rows(), M.cols());
    for (const auto& c : sd.clusters) jc.S += c.eigenvalue * c.projector;
    jc.N = M - jc.S;
    return jc;
}

inline MultiplicativeJC multiplicative_jc(const CMatrix& M, double tol = default_tol) {
    SpectralData sd = spectral_decompose(M, tol);
    CMatrix S = CMatrix::Zero(M.rows(), M.cols());
    CMatrix Sinv = CMatrix::Zero(M.rows(), M.cols());
    for (const auto& c : sd.clusters) {
        if (std::abs(c.eigenvalue) <= tol)
            throw Singular("multiplicative_jc: eigenvalue cluster at zero, input not invertible");
        S += c.eigenvalue * c.projector;
        Sinv += (1.0 / c.eigenvalue) * c.projector;
    }
    MultiplicativeJC jc;
    jc.Ms = S;
    jc.Mu = Sinv * M;  // = I + Ms^-1 N, unipotent since Ms^-1 N is nilpotent
    return jc;
}

inline RealImagSplit real_imag_split(const CMatrix& S, double tol = default_tol) {
    SpectralData sd = spectral_decompose(S, tol);
    const double nn = fnorm(sd.nilpotent);
    if (nn > tol * std::max(1.0, fnorm(S)))
        throw NotSemisimple("real_imag_split: nilpotent part has norm " + std::to_string(nn));
    RealImagSplit ri;
    ri.a = CMatrix::Zero(S.rows(), S.cols());
    ri.b = CMatrix::Zero(S.rows(), S.cols());
    for (const auto& c : sd.clusters) {
        ri.a += c.eigenvalue.real() * c.projector;
        ri.b += c.eigenvalue.imag() * c.projector;
    }
    return ri;
}

} // namespace logconn
