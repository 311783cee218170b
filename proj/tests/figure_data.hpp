#pragma once

// Plotted coordinates (omega, value) of the rate and entropy-bound figures.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace figure_data {

using Points = std::vector<std::pair<double, double>>;

inline const Points kAsymptotic = {
    {0.775013, -0.00628557}, {0.776684, 0.00797869}, {0.778355, 0.0224093}, {0.780026, 0.0370094},
    {0.781697, 0.0517826}, {0.783369, 0.0667322}, {0.78504, 0.0818622}, {0.786711, 0.0971763},
    {0.788382, 0.112679}, {0.790053, 0.128374}, {0.791724, 0.144266}, {0.793395, 0.16036},
    {0.795066, 0.176661}, {0.796737, 0.193175}, {0.798408, 0.209907}, {0.800079, 0.226862},
    {0.80175, 0.244049}, {0.803421, 0.261473}, {0.805092, 0.279141}, {0.806763, 0.297062},
    {0.808435, 0.315244}, {0.810106, 0.333696}, {0.811777, 0.352427}, {0.813448, 0.371448},
    {0.815119, 0.39077}, {0.81679, 0.410406}, {0.818461, 0.430369}, {0.820132, 0.450674},
    {0.821803, 0.471337}, {0.823474, 0.492376}, {0.825145, 0.51381}, {0.826816, 0.535663},
    {0.828487, 0.557959}, {0.830158, 0.580727}, {0.83183, 0.603998}, {0.833501, 0.627812},
    {0.835172, 0.652211}, {0.836843, 0.677247}, {0.838514, 0.702982}, {0.840185, 0.729494},
    {0.841856, 0.756876}, {0.843527, 0.785253}, {0.845198, 0.814787}, {0.846869, 0.845711},
    {0.84854, 0.878374}, {0.850211, 0.91337}, {0.851882, 0.95195}, {0.853553, 1},
};

inline const Points kRateN1e12 = {
    {0.77, -0.060422}, {0.77415, -0.0266105}, {0.7783, 0.00817149}, {0.78245, 0.0439699},
    {0.7866, 0.0808357}, {0.79075, 0.118826}, {0.7949, 0.158007}, {0.79905, 0.19845},
    {0.8032, 0.240243}, {0.80735, 0.283482}, {0.8115, 0.328285}, {0.81565, 0.37479},
    {0.8198, 0.423165}, {0.82395, 0.473617}, {0.8281, 0.526409}, {0.83225, 0.581888},
    {0.8364, 0.640525}, {0.84055, 0.703009}, {0.8447, 0.770431}, {0.84885, 0.844809},
    {0.853, 0.931351},
};

inline const Points kRateN1e10 = {
    {0.7783, -0.00527627}, {0.780375, 0.0115888}, {0.78245, 0.028699}, {0.784525, 0.0460603},
    {0.7866, 0.0636792}, {0.788675, 0.0815624}, {0.79075, 0.0997171}, {0.792825, 0.118151},
    {0.7949, 0.136872}, {0.796975, 0.155889}, {0.79905, 0.175211}, {0.801125, 0.194848},
    {0.8032, 0.214812}, {0.805275, 0.235113}, {0.80735, 0.255764}, {0.809425, 0.276778},
    {0.8115, 0.298171}, {0.813575, 0.319958}, {0.81565, 0.342158}, {0.817725, 0.364789},
    {0.8198, 0.387874}, {0.821875, 0.411436}, {0.82395, 0.435502}, {0.826025, 0.460102},
    {0.8281, 0.485272}, {0.830175, 0.51105}, {0.83225, 0.537482}, {0.834325, 0.564622},
    {0.8364, 0.592533}, {0.838475, 0.621291}, {0.84055, 0.650991}, {0.842625, 0.68175},
    {0.8447, 0.713722}, {0.846775, 0.747115}, {0.84885, 0.782224}, {0.850925, 0.819504},
    {0.853, 0.859758},
};

inline const Points kRateN1e8 = {
    {0.78245, -0.0177506}, {0.7866, 0.01127870}, {0.79075, 0.041160627}, {0.7949, 0.07193876},
    {0.79905, 0.10366215}, {0.8032, 0.13638638}, {0.80735, 0.170174940}, {0.8115, 0.205101022},
    {0.81565, 0.24124991}, {0.8198, 0.278722214}, {0.82395, 0.31763837}, {0.8281, 0.35814516},
    {0.832249999, 0.400425285}, {0.8364, 0.44471246}, {0.84055, 0.49131627}, {0.8447, 0.54066632},
    {0.84885, 0.5933995}, {0.853, 0.65056124},
};

inline const Points kRateN1e7 = {
    {0.79075, -0.0140405}, {0.7949, 0.0102783}, {0.79905, 0.0353165}, {0.8032, 0.0611116},
    {0.80735, 0.0877063}, {0.8115, 0.115149}, {0.81565, 0.143494}, {0.8198, 0.172806},
    {0.82395, 0.203161}, {0.8281, 0.234646}, {0.83225, 0.267368}, {0.8364, 0.301459},
    {0.84055, 0.337083}, {0.8447, 0.374454}, {0.84885, 0.413858}, {0.853, 0.4557},
};

inline const Points kRateN1e6 = {
    {0.8115, -0.0170334}, {0.81565, 0.00141505}, {0.8198, 0.0204221}, {0.82395, 0.0400194},
    {0.8281, 0.0602427}, {0.83225, 0.081133}, {0.8364, 0.102738}, {0.84055, 0.125113},
    {0.8447, 0.148325}, {0.84885, 0.172452}, {0.853, 0.197594},
};

inline const Points kConditionalBound = {
    {0.75, 0.201752}, {0.753452, 0.176646}, {0.756904, 0.150974}, {0.760355, 0.124719},
    {0.763807, 0.0978629}, {0.767259, 0.0703864}, {0.770711, 0.042268}, {0.774162, 0.0134847},
    {0.777614, -0.0159887}, {0.781066, -0.0461796}, {0.784518, -0.0771181}, {0.78797, -0.108837},
    {0.791421, -0.141374}, {0.794873, -0.174769}, {0.798325, -0.209068}, {0.801777, -0.244322},
    {0.805228, -0.280591}, {0.80868, -0.31794}, {0.812132, -0.356447}, {0.815584, -0.396202},
    {0.819036, -0.437312}, {0.822487, -0.479905}, {0.825939, -0.524139}, {0.829391, -0.570209},
    {0.832843, -0.61837}, {0.836294, -0.668959}, {0.839746, -0.722456}, {0.843198, -0.779581},
    {0.84665, -0.841563}, {0.850102, -0.910984}, {0.853553, -1},
};

struct RateCurve {
  std::uint64_t n;
  const Points* points;
};

inline const std::array<RateCurve, 5> kRateCurves{{
    {1000000ULL, &kRateN1e6},
    {10000000ULL, &kRateN1e7},
    {100000000ULL, &kRateN1e8},
    {10000000000ULL, &kRateN1e10},
    {1000000000000ULL, &kRateN1e12},
}};

}  // namespace figure_data
