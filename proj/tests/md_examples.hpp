#pragma once

// curated classification fixtures for the distinct-fingerprint class:
// 30 matrices with known in/out verdicts, used by the unit tests and the
// acceptance gate

#include <string>
#include <vector>

namespace md_examples {

struct Example {
  std::vector<std::string> rows;
  bool in_class;
};

inline const std::vector<Example>& all() {
  static const std::vector<Example> ex = {
      // d = 3, members
      {{"100", "010", "001"}, true},
      {{"110", "010", "001"}, true},
      {{"111", "010", "001"}, true},
      {{"101", "110", "001"}, true},
      {{"111", "011", "001"}, true},
      // d = 3, non-members
      {{"110", "110", "101"}, false},
      {{"101", "110", "101"}, false},
      {{"110", "110", "001"}, false},
      {{"111", "111", "111"}, false},
      {{"110", "011", "101"}, false},
      // d = 4, members
      {{"1110", "0110", "1011", "0111"}, true},
      {{"1100", "0100", "0010", "0001"}, true},
      {{"1110", "0100", "0010", "0001"}, true},
      {{"1011", "1100", "0010", "0001"}, true},
      {{"1111", "0110", "0010", "0001"}, true},
      // d = 4, non-members
      {{"1010", "0110", "1010", "0001"}, false},
      {{"1100", "1100", "0010", "0001"}, false},
      {{"1100", "1101", "0111", "0001"}, false},
      {{"1110", "1101", "0110", "0011"}, false},
      {{"1110", "1101", "1110", "1011"}, false},
      // d = 5, members
      {{"11100", "11000", "01110", "00110", "00111"}, true},
      {{"11111", "11101", "11110", "01010", "11001"}, true},
      {{"11000", "11001", "11110", "01011", "01111"}, true},
      {{"11000", "01100", "00110", "00011", "00001"}, true},
      // d = 5, non-members
      {{"11000", "01110", "10101", "01010", "01001"}, false},
      {{"11101", "11110", "00111", "10111", "01001"}, false},
      {{"10010", "01011", "10101", "10011", "01101"}, false},
      {{"11000", "01101", "00100", "01011", "10011"}, false},
      // member despite duplicate rows (d = 5)
      {{"11001", "01110", "10100", "10110", "11001"}, true},
      // member despite being singular (d = 4)
      {{"1010", "0101", "0110", "1001"}, true},
  };
  return ex;
}

}  // namespace md_examples
