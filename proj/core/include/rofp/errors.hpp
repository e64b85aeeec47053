#pragma once

#include <stdexcept>
#include <string>

namespace rofp {

/// Base class for all rofp errors. CLI maps any of these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad parameters or input data (non-finite values, empty vectors, bad grids).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Out-of-range path or column access.
class IndexError : public ValidationError {
public:
    explicit IndexError(const std::string& msg) : ValidationError(msg) {}
};

/// Malformed layout manifest or measurement CSV.
class ParseError : public ValidationError {
public:
    explicit ParseError(const std::string& msg) : ValidationError(msg) {}
};

/// A (path,col,row) cell appears more than once in a measurement file.
class DuplicateCellError : public ValidationError {
public:
    explicit DuplicateCellError(const std::string& msg) : ValidationError(msg) {}
};

/// A cell required by the layout is absent from a measurement file.
class MissingCellError : public ValidationError {
public:
    explicit MissingCellError(const std::string& msg) : ValidationError(msg) {}
};

/// A cell refers to a path/column/row the layout does not define.
class LayoutMismatchError : public ValidationError {
public:
    explicit LayoutMismatchError(const std::string& msg) : ValidationError(msg) {}
};

/// Aging region does not intersect the device layout.
class InvalidRegionError : public ValidationError {
public:
    explicit InvalidRegionError(const std::string& msg) : ValidationError(msg) {}
};

/// k-means cannot form k clusters (fewer distinct points than k).
class DegenerateClusteringError : public ValidationError {
public:
    explicit DegenerateClusteringError(const std::string& msg) : ValidationError(msg) {}
};

/// Filesystem failures, reported with the offending path.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace rofp
