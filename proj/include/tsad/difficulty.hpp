#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsad/shapedist.hpp"

namespace tsad {

struct SequenceSets {
    std::vector<Sequence> std_set;
    std::vector<Sequence> nor_set;
    std::vector<Sequence> ano_set;
    std::size_t k = 5;
};

/// Ratio of mean k-NN SBD to the standard set: anomalous over normal.
double knc(const SequenceSets& sets);

/// Relative contrast: E[mean distance] / E[1-NN distance] over all sequences.
double rc(const std::vector<Sequence>& all_seqs);

/// Ratio of mean pairwise intra-set SBD: normal over anomalous.
double nc(const std::vector<Sequence>& nor_set, const std::vector<Sequence>& ano_set);

/// Min anomalous-to-normal centroid SBD over mean pairwise normal-centroid SBD.
double na(const std::vector<Sequence>& nor_set, const std::vector<Sequence>& ano_set,
          std::size_t k_nor, std::size_t k_ano, std::uint64_t seed);

enum class KncBand { Below1, From1To2, From2To5, From5To10, Above10 };

/// Half-open bands [0,1), [1,2), [2,5), [5,10), [10,inf).
KncBand knc_band(double knc_value);
std::string knc_band_name(KncBand band);

}  // namespace tsad
