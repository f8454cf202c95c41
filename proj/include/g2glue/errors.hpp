#pragma once

#include <stdexcept>
#include <string>

namespace g2glue {

// Error taxonomy. Every failure mode named in the module contracts gets its
// own type so callers (and the CLI driver) can map failures to exit codes
// without string matching.

struct NotPositive : std::runtime_error {
    explicit NotPositive(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct JacobiViolation : std::runtime_error {
    explicit JacobiViolation(const std::string& what) : std::runtime_error(what) {}
};

struct MetricNotPositive : std::runtime_error {
    explicit MetricNotPositive(const std::string& what) : std::runtime_error(what) {}
};

struct NoSolution : std::runtime_error {
    explicit NoSolution(const std::string& what) : std::runtime_error(what) {}
};

struct NKViolation : std::runtime_error {
    explicit NKViolation(const std::string& what) : std::runtime_error(what) {}
};

struct NotClosed : std::runtime_error {
    explicit NotClosed(const std::string& what) : std::runtime_error(what) {}
};

struct RateOutOfRange : std::runtime_error {
    explicit RateOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct LogObstruction : std::runtime_error {
    explicit LogObstruction(const std::string& what) : std::runtime_error(what) {}
};

struct EndpointCritical : std::runtime_error {
    explicit EndpointCritical(const std::string& what) : std::runtime_error(what) {}
};

struct UnexpectedKernel : std::runtime_error {
    explicit UnexpectedKernel(const std::string& what) : std::runtime_error(what) {}
};

struct InadmissibleScale : std::runtime_error {
    explicit InadmissibleScale(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveValue : std::runtime_error {
    explicit NonPositiveValue(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigParse : std::runtime_error {
    explicit ConfigParse(const std::string& what) : std::runtime_error(what) {}
};

struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace g2glue
