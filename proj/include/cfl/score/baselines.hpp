#pragma once

#include <cstdint>
#include <vector>

#include "cfl/mil/instrument.hpp"
#include "cfl/profile.hpp"
#include "cfl/score/ranking.hpp"

namespace cfl {

// Coverage spectra of one element. A site is covered in a run iff its
// recorded value is non-NA.
struct SpectraCounts {
    double ef = 0;  // failing runs covering the element
    double ep = 0;  // passing runs covering the element
    double nf = 0;  // failing runs not covering
    double np = 0;  // passing runs not covering
};

SpectraCounts spectra_for_site(const ProfileMatrix& profiles, int site);

// ef / sqrt((ef+nf)(ef+ep)); 0 when ef == 0.
double ochiai(const SpectraCounts& c);

// ef^star / (ep + nf); +infinity when the denominator is 0 and ef > 0.
double dstar(const SpectraCounts& c, double star = 2.0);

// Modified linear-regression technique: OLS of Y on [coverage indicator of
// the site, parent values (NA -> 0 plus missingness indicators)]; the score
// is the coverage coefficient clamped below at 0. Collinear columns are
// dropped by in-order pivoted elimination (intercept and treatment first).
double baah_lr(const ProfileMatrix& profiles, const mil::SiteTable& sites, int site);

// Elastic-predicate score: |mean over failing runs of the z-score of the
// site's value| with z computed from passing-run mean and sample std.
// Degenerate std: 0 if the failing values equal the passing constant, else
// +infinity. `scored` is false when the site is skipped (non-numeric values,
// fewer than 2 passing or 1 failing observations).
double esp_score(const ProfileMatrix& profiles, int site, bool& scored);

// Full rankings over the shared line universe.
Ranking baseline_ranking(Technique technique, const ProfileMatrix& profiles,
                         const mil::InstrumentedProgram& prog, bool include_phi = false);

struct PredicateSwitchOptions {
    int64_t step_limit = 10'000'000;
    unsigned jobs = 1;
};

// Interventional baseline: for every predicate executed by a failing test,
// re-runs that test with the predicate's combined value negated on every
// dynamic evaluation; the score is the fraction of failing tests the flip
// fixes. Runs that hit the step limit count as still failing. Ranks only
// predicate lines.
Ranking predicate_switch(const mil::InstrumentedProgram& prog, const TestSuite& suite,
                         const ProfileMatrix& profiles, const PredicateSwitchOptions& options = {});

}  // namespace cfl
