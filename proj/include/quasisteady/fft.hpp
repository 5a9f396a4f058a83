#ifndef QUASISTEADY_FFT_HPP
#define QUASISTEADY_FFT_HPP

#include <fftw3.h>

#include <map>
#include <tuple>

#include "quasisteady/core.hpp"

namespace qs {
namespace fft {

// Cached FFTW plans keyed by (rank, size-per-dim, sign). Single-threaded use:
// planning is not thread safe and the scan/solve contracts do not need it.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void execute(int rank, int n, int sign, CVector& data) {
        const int total = static_cast<int>(data.size());
        auto key = std::make_tuple(rank, n, sign);
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            Buffer buf;
            buf.data = fftw_alloc_complex(total);
            int dims[2] = {n, n};
            buf.plan = fftw_plan_dft(rank, dims, buf.data, buf.data, sign, FFTW_ESTIMATE);
            it = plans_.emplace(key, buf).first;
        }
        auto* raw = reinterpret_cast<Complex*>(it->second.data);
        for (int i = 0; i < total; ++i) raw[i] = data(i);
        fftw_execute(it->second.plan);
        for (int i = 0; i < total; ++i) data(i) = raw[i];
    }

  private:
    struct Buffer {
        fftw_complex* data = nullptr;
        fftw_plan plan = nullptr;
    };
    std::map<std::tuple<int, int, int>, Buffer> plans_;

    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, buf] : plans_) {
            fftw_destroy_plan(buf.plan);
            fftw_free(buf.data);
        }
    }
};

// Unnormalized DFT in FFTW index convention, in place.
inline void dft(CVector& data, int rank, int n, int sign) {
    PlanCache::instance().execute(rank, n, sign, data);
}

// Tangential transforms between Fourier coefficients indexed by
// k in [-K, K]^{dims} (flat index: dimension 0 fastest, offset K) and
// physical samples on the uniform torus grid with N = 2K+1 points per dim.
//   phys(x_j) = sum_k coef(k) exp(i k . x_j 2 pi / L)
inline int mode_flat(const Eigen::VectorXi& k, int K) {
    const int N = 2 * K + 1;
    int flat = 0, stride = 1;
    for (int d = 0; d < k.size(); ++d) {
        flat += (k(d) + K) * stride;
        stride *= N;
    }
    return flat;
}

inline Eigen::VectorXi mode_unflat(int flat, int K, int dims) {
    const int N = 2 * K + 1;
    Eigen::VectorXi k(dims);
    for (int d = 0; d < dims; ++d) {
        k(d) = flat % N - K;
        flat /= N;
    }
    return k;
}

inline CVector modes_to_phys(const CVector& coef, int K, int dims) {
    const int N = 2 * K + 1;
    CVector work = CVector::Zero(coef.size());
    // shift coefficient layout (offset K) to FFTW layout (k mod N)
    for (int flat = 0; flat < coef.size(); ++flat) {
        Eigen::VectorXi k = mode_unflat(flat, K, dims);
        int idx = 0, stride = 1;
        for (int d = 0; d < dims; ++d) {
            idx += ((k(d) + N) % N) * stride;
            stride *= N;
        }
        work(idx) = coef(flat);
    }
    dft(work, dims, N, FFTW_BACKWARD);
    return work;
}

inline CVector phys_to_modes(const CVector& phys, int K, int dims) {
    const int N = 2 * K + 1;
    CVector work = phys;
    dft(work, dims, N, FFTW_FORWARD);
    work /= std::pow(static_cast<double>(N), dims);
    CVector coef(phys.size());
    for (int flat = 0; flat < coef.size(); ++flat) {
        Eigen::VectorXi k = mode_unflat(flat, K, dims);
        int idx = 0, stride = 1;
        for (int d = 0; d < dims; ++d) {
            idx += ((k(d) + N) % N) * stride;
            stride *= N;
        }
        coef(flat) = work(idx);
    }
    return coef;
}

}  // namespace fft
}  // namespace qs

#endif
