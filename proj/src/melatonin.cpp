#include "dlmo/melatonin.hpp"

#include "dlmo/errors.hpp"

namespace dlmo {

DlmoLabel extract_dlmo(const MelatoninProfile& profile, double threshold_pg_ml) {
    const auto& s = profile.samples;
    if (s.size() < 2)
        throw TooFewSamples("participant " + profile.participant + ": melatonin profile has " +
                            std::to_string(s.size()) + " sample(s), need at least 2");
    if (s.front().concentration >= threshold_pg_ml)
        throw AlreadyAbove("participant " + profile.participant +
                           ": first melatonin sample already at or above threshold, onset unobserved");

    for (std::size_t k = 1; k < s.size(); ++k) {
        if (s[k].concentration < threshold_pg_ml) continue;
        // First sample at or above threshold; everything before is below.
        const double c0 = s[k - 1].concentration;
        const double c1 = s[k].concentration;
        const double t0 = s[k - 1].time;
        const double t1 = s[k].time;
        DlmoLabel label;
        label.participant = profile.participant;
        label.collection_day = profile.collection_day;
        label.phi = c1 == threshold_pg_ml
                        ? t1
                        : t0 + (threshold_pg_ml - c0) / (c1 - c0) * (t1 - t0);
        return label;
    }
    throw NoOnset("participant " + profile.participant +
                  ": melatonin never reached " + std::to_string(threshold_pg_ml) + " pg/mL");
}

}  // namespace dlmo
