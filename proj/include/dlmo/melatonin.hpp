#pragma once

#include "dlmo/core.hpp"
#include "dlmo/ingest.hpp"

namespace dlmo {

// Time of the first upward threshold crossing of a melatonin profile,
// linearly interpolated between the bracketing samples. A sample exactly at
// the threshold (and first to reach it) returns its own time.
//
// Throws TooFewSamples (< 2 samples), AlreadyAbove (first sample >=
// threshold, onset unobserved) and NoOnset (profile never reaches the
// threshold).
DlmoLabel extract_dlmo(const MelatoninProfile& profile, double threshold_pg_ml = 5.0);

}  // namespace dlmo
