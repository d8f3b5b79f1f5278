#pragma once

#include <stdexcept>
#include <string>

namespace fcb {

// Base for every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

// Detector model missing or unusable. Distinct from "no face in frame".
class DetectorError : public Error {
 public:
  using Error::Error;
};

class InferenceError : public Error {
 public:
  using Error::Error;
};

// Embedding came back with zero norm or non-finite components.
class DegenerateEmbedding : public InferenceError {
 public:
  using InferenceError::InferenceError;
};

// Fewer than two valid frames, or another condition that makes a video
// impossible to score. Reported and excluded from aggregation.
class UnscorableVideo : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcb
