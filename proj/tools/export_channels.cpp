// Writes the registered targets and a few example channels as JSON files.
#include <filesystem>
#include <iostream>

#include "chanres/channel_io.hpp"
#include "chanres/free_sets.hpp"

using namespace chanres;

int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(root / "targets");
  std::filesystem::create_directories(root / "channels");
  for (const char* name : {"I2", "Had", "CNOT", "G2", "G+", "GPhi+"})
    write_channel(root / "targets" / (std::string(name) + ".json"), target_channel(name));

  const auto ch = root / "channels";
  write_channel(ch / "id2.json", channels::identity(2));
  write_channel(ch / "id4.json", channels::identity(4));
  write_channel(ch / "z.json", channels::unitary(channels::pauli_z()));
  write_channel(ch / "had.json", channels::unitary(channels::hadamard()));
  write_channel(ch / "id8.json", channels::identity(8));
  write_channel(ch / "cnot.json", channels::unitary(channels::cnot()));
  write_channel(ch / "dephasing2.json", channels::dephasing(2));
  write_channel(ch / "fully_depolarizing2.json", channels::fully_depolarizing(2, 2));
  for (double p : {0.1, 0.5, 1.0}) {
    char name[64];
    std::snprintf(name, sizeof name, "depolarizing2_p%.1f.json", p);
    write_channel(ch / name, channels::depolarizing(2, p));
  }
  std::cout << "wrote " << root.string() << "\n";
  return 0;
}
