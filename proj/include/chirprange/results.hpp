#pragma once

#include <cmath>
#include <string>

#include "chirprange/room.hpp"

namespace chirprange {

// One distance estimate: which receiver, which estimator, which noise trial.
struct ResultRecord {
    Vec3 receiver{};
    double true_distance_m = 0.0;
    std::string estimator;
    double snr_db = 0.0;
    long trial = 0;
    double estimated_distance_m = 0.0;
    double abs_error_m = 0.0;
};

inline ResultRecord make_record(const Vec3& receiver, double true_distance_m,
                                std::string estimator, double snr_db, long trial,
                                double estimated_distance_m) {
    ResultRecord r;
    r.receiver = receiver;
    r.true_distance_m = true_distance_m;
    r.estimator = std::move(estimator);
    r.snr_db = snr_db;
    r.trial = trial;
    r.estimated_distance_m = estimated_distance_m;
    r.abs_error_m = std::abs(estimated_distance_m - true_distance_m);
    return r;
}

}  // namespace chirprange
