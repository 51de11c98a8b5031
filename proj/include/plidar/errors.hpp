#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace plidar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Image sizes disagree, or a crop/window exceeds its source.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An operation that needs at least one point received an empty cloud.
class EmptyCloudError : public Error {
public:
    using Error::Error;
};

/// Two index-aligned sequences (cloud/flow, cloud/cloud) differ in length.
class SizeMismatchError : public Error {
public:
    using Error::Error;
};

/// A value or parameter violates a documented precondition.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// A file could not be parsed. `offset` is the byte offset of the problem,
/// or -1 when no single offset applies.
class FormatError : public Error {
public:
    FormatError(const std::string& path, std::int64_t offset, const std::string& what)
        : Error(path + (offset >= 0 ? " @" + std::to_string(offset) : std::string()) + ": " + what),
          offset_(offset) {}

    std::int64_t offset() const noexcept { return offset_; }

private:
    std::int64_t offset_;
};

/// Opening, reading, or writing a file failed at the OS level.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace plidar
