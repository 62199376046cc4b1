// Line-protocol model used by the tests:
//   INIT -> READY <m>; PREDICT v1,...,vn -> CLASS c,...,c; SHUTDOWN
// c is the first feature rounded half away from zero, taken mod 2.
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
  int labels = 1;
  std::string mode = "ok";
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    if (flag == "--labels") labels = std::atoi(argv[i + 1]);
    if (flag == "--mode") mode = argv[i + 1];
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line == "INIT") {
      std::cout << "READY " << labels << std::endl;
    } else if (line.rfind("PREDICT ", 0) == 0) {
      if (mode == "die") return 1;
      if (mode == "silent") {
        std::this_thread::sleep_for(std::chrono::seconds(30));
        continue;
      }
      if (mode == "garbage") {
        std::cout << "HELLO" << std::endl;
        continue;
      }
      double first = std::strtod(line.c_str() + 8, nullptr);
      long c = std::labs(std::lround(first)) % 2;
      int count = mode == "wrong-arity" ? labels + 1 : labels;
      std::cout << "CLASS ";
      for (int k = 0; k < count; ++k) std::cout << (k ? "," : "") << c;
      std::cout << std::endl;
    } else if (line == "SHUTDOWN") {
      return 0;
    } else {
      std::cout << "ERROR unknown request" << std::endl;
    }
  }
  return 0;
}
