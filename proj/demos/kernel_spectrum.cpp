// Closed-form single-reflector eigenvalues against a dense eigensolver.
#include <cint/cint.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    using namespace cint;
    double H = argc > 1 ? std::atof(argv[1]) : 11.36;
    double h = argc > 2 ? std::atof(argv[2]) : 1.0;
    SingleSpectrumResult r = single_reflector_oracle(H, h);
    std::printf("ratio (H-h/2)/(H+h/2) = %.6f, sqrt(Hh) = %.4f\n", r.expected_ratio, r.gaussian_std);
    std::printf(" n  closed        ratio(dense)  rel.err     overlap\n");
    for (int n = 0; n < 5; ++n)
        std::printf("%2d  %.6e  %.6f      %.2e    %.8f\n", n, closed_eigenvalue(1.0, n, H, h), r.ratios[n],
                    r.value_errors[n], r.overlaps[n]);
    PairSpectrumResult p = pair_oracle(3.5, H, h);
    std::printf("two reflectors at 3.5H: composite %.6e, dense %.6e, rel.err %.2e, signed sign change %s\n",
                p.composite, p.dense, p.rel_error, p.sign_change ? "yes" : "no");
}
