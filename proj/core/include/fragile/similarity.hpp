#pragma once

#include <optional>

#include "fragile/fingerprint.hpp"
#include "fragile/mask.hpp"

namespace fragile {

enum class Measure { ncc, pce };
const char* to_string(Measure m);

// Pearson correlation over all samples. Throws DegenerateError if either
// plane is constant.
double ncc(const ImagePlane& a, const ImagePlane& b);

// Signed peak-to-correlation energy at zero shift. The energy term averages
// the squared circular cross-correlation outside an 11x11 window around the
// zero shift.
inline constexpr std::size_t kPceExclusion = 11;
double pce(const ImagePlane& residual, const ImagePlane& templ);

double similarity(const ImagePlane& a, const ImagePlane& b, Measure measure);

struct SimilarityReport {
  Measure measure = Measure::pce;
  double value = 0.0;
  double threshold = 0.0;
  bool decision = false;
  std::optional<int> cutoff_c;
};

// sim(H(W), H(J * K-hat)) for a precomputed residual W of the query J. No mask
// compares the full band.
double residual_score(const ImagePlane& residual, const ImagePlane& query, const ImagePlane& fp,
                      const std::optional<SubbandMask>& mask, Measure measure);

SimilarityReport identify(const ImagePlane& query, const Fingerprint& fp,
                          const std::optional<SubbandMask>& mask, Measure measure,
                          double threshold, double sigma0 = kDefaultDenoiseSigma);
SimilarityReport identify(const ImagePlane& query, const Fingerprint& fp, const Cutoff& cutoff,
                          Measure measure, double threshold, double sigma0 = kDefaultDenoiseSigma);

}  // namespace fragile
