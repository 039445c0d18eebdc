#pragma once

#include <stdexcept>
#include <string>

namespace raftcensus {

/// Bad or inconsistent input data (files, dimensions, model arity, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a scene contains no detectable water body.
class NoWaterError : public DataError {
public:
    using DataError::DataError;
};

/// Histogram with fewer than two occupied bins; Otsu has no split.
class DegenerateHistogramError : public DataError {
public:
    using DataError::DataError;
};

/// Non-finite loss during training; carries the epoch it happened in.
class DivergenceError : public DataError {
public:
    DivergenceError(const std::string& what, int epoch) : DataError(what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace raftcensus
