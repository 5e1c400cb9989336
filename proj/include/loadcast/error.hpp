#pragma once

#include <stdexcept>
#include <string>

namespace loadcast {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
	explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Resampling between steps that are not integer multiples of each other.
class StepMismatchError : public Error {
public:
	using Error::Error;
};

/// An operation received fewer observations than it needs.
class InsufficientDataError : public Error {
public:
	using Error::Error;
};

/// A series with zero variance where variation is required.
class DegenerateSeriesError : public Error {
public:
	using Error::Error;
};

/// Relative error is undefined because every reference value is zero.
class UndefinedRelativeError : public Error {
public:
	using Error::Error;
};

/// A split fraction produced an empty segment.
class SplitTooFineError : public Error {
public:
	using Error::Error;
};

/// Model estimation did not converge or produced an inadmissible optimum.
class FitFailedError : public Error {
public:
	using Error::Error;
};

/// Every candidate configuration of a hyperparameter search failed.
class SearchFailedError : public Error {
public:
	using Error::Error;
};

/// A method cannot run for the requested sampling rate.
class MethodUnavailableError : public Error {
public:
	using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingDivergedError : public Error {
public:
	using Error::Error;
};

/// Malformed input data (CSV, config, results files).
class DataError : public Error {
public:
	using Error::Error;
};

} // namespace loadcast
