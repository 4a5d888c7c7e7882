#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "darja/corpus.hpp"
#include "darja/rng.hpp"

namespace darja {

// Seeded telecom-support corpus in Latin-script and Arabic-script Darja with
// the noise real chat logs carry. Stands in for private operator data.
struct SynthOptions {
    std::size_t per_intent = 60;
    std::uint64_t seed = 7;
    double arabic_share = 0.4;
    double noise_rate = 0.35;  // chance each noise operator fires on an utterance
};

// Intent names in generation order; the last one is the knowledge intent.
const std::vector<std::string>& synthetic_intents();
inline constexpr std::string_view kSyntheticKnowledgeIntent = "offer_info";

Dataset synthesize_corpus(const SynthOptions& options = {});

namespace noise {

// Stretches one letter into a run of 3 to 6 ("salaaaam").
std::string elongate(std::string_view text, Rng& rng);
// Arabizi digits for Latin letters: a→3, h→7, q→9 on one eligible letter.
std::string arabizi_digit(std::string_view text, Rng& rng);
// One of ا→أ/إ/آ, ة→ه, ي→ى on a random eligible letter.
std::string alef_variant(std::string_view text, Rng& rng);
// Uppercases ASCII letters at random.
std::string random_case(std::string_view text, Rng& rng);

}  // namespace noise

}  // namespace darja
