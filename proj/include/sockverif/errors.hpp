// Exception types shared across the library. Each maps to one failure mode
// of a public operation; all derive from Error so callers can catch broadly.
#ifndef SOCKVERIF_ERRORS_HPP
#define SOCKVERIF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sockverif {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

struct MalformedRecord : Error {
  std::size_t line;
  MalformedRecord(std::size_t line_no, const std::string& what_arg)
      : Error("line " + std::to_string(line_no) + ": " + what_arg), line(line_no) {}
};

struct DuplicateId : Error {
  std::string id;
  explicit DuplicateId(const std::string& doc_id)
      : Error("duplicate document id: " + doc_id), id(doc_id) {}
};

struct UnknownAuthor : Error {
  explicit UnknownAuthor(const std::string& author)
      : Error("author not in corpus: " + author) {}
};

struct TooFewPositives : Error {
  using Error::Error;
};

struct EmptyTestAuthors : Error {
  using Error::Error;
};

struct MalformedTree : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct MissingParses : Error {
  using Error::Error;
};

struct SingleClass : Error {
  using Error::Error;
};

struct EmptyVocabulary : Error {
  using Error::Error;
};

struct DegenerateLabels : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

struct VocabularyMismatch : Error {
  using Error::Error;
};

struct TooFewInstances : Error {
  using Error::Error;
};

struct EmptyTraining : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

}  // namespace sockverif

#endif
