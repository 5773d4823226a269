#include "fixtures.hpp"

#include "archspec.hpp"

namespace snntopo {

namespace {

constexpr double kSparsities[5] = {0.6, 0.8, 0.9, 0.95, 0.98};
const char* const kArchs[4] = {"conv6", "resnet20", "resnet32", "wide-resnet-28-2"};
const char* const kAlgos[7] = {"snip", "grasp", "synflow", "prospr", "uniform", "er", "erk"};
const char* const kDatasets[3] = {"cifar10", "cifar100", "tiny-imagenet"};

struct Cell {
  double acc, dev;
};

// [algorithm][architecture][sparsity]; acc < 0 marks a blank cell (the run
// collapsed below chance and was not reported).
using Table = Cell[7][4][5];

const Table kCifar10 = {
    // snip
    {{{92.7, .3}, {92.0, .1}, {91.1, .1}, {89.6, .2}, {83.8, .3}},
     {{90.5, .4}, {89.0, .3}, {87.0, .0}, {83.2, .4}, {75.9, .5}},
     {{91.7, .1}, {90.5, .2}, {88.9, .2}, {86.3, .1}, {80.2, .6}},
     {{94.1, .2}, {93.2, .2}, {92.2, .2}, {90.6, .2}, {87.2, .3}}},
    // grasp
    {{{92.2, .1}, {91.6, .1}, {90.7, .1}, {89.5, .1}, {86.0, .3}},
     {{90.2, .1}, {89.1, .3}, {87.2, .1}, {84.4, .0}, {77.1, .2}},
     {{91.3, .3}, {90.4, .1}, {89.1, .4}, {86.6, .2}, {81.8, .0}},
     {{94.0, .2}, {93.0, .1}, {91.9, .1}, {90.5, .1}, {87.7, .3}}},
    // synflow
    {{{92.7, .1}, {92.1, .1}, {91.3, .3}, {89.8, .2}, {86.8, .2}},
     {{90.5, .3}, {89.3, .1}, {86.2, .3}, {82.9, .2}, {76.2, .3}},
     {{91.6, .3}, {90.4, .5}, {88.7, .2}, {85.6, .2}, {79.7, .5}},
     {{93.9, .1}, {93.1, .1}, {91.6, .3}, {90.4, .2}, {86.6, .4}}},
    // prospr
    {{{92.5, .3}, {91.7, .3}, {90.5, .3}, {89.2, .3}, {85.3, .5}},
     {{90.6, .2}, {89.4, .1}, {86.4, .3}, {81.8, .5}, {74.6, .5}},
     {{91.9, .1}, {90.7, .4}, {88.4, .4}, {84.3, 1.0}, {54.4, .0}},
     {{94.0, .3}, {93.4, .1}, {92.1, .2}, {90.5, .3}, {87.2, .6}}},
    // uniform
    {{{92.3, .2}, {91.1, .1}, {89.2, .1}, {86.4, .4}, {79.7, .1}},
     {{90.1, .1}, {88.2, .4}, {85.5, .3}, {77.7, 4.2}, {54.7, 6.9}},
     {{91.2, .3}, {89.8, .2}, {87.8, .4}, {81.9, 5.3}, {44.1, 8.0}},
     {{93.5, .1}, {92.5, .0}, {90.9, .0}, {89.0, .1}, {84.3, .6}}},
    // er
    {{{91.3, .1}, {90.2, .1}, {88.6, .2}, {86.5, .1}, {82.7, .2}},
     {{90.5, .2}, {89.1, .1}, {86.9, .3}, {83.8, .2}, {77.0, .3}},
     {{91.6, .2}, {90.8, .1}, {88.9, .0}, {85.5, .2}, {81.8, .2}},
     {{93.8, .1}, {93.2, .2}, {92.1, .1}, {90.4, .2}, {87.0, .0}}},
    // erk
    {{{91.3, .1}, {90.2, .2}, {88.8, .3}, {86.7, .1}, {82.5, .1}},
     {{90.8, .3}, {89.4, .3}, {87.1, .1}, {83.8, .2}, {77.4, .2}},
     {{91.6, .3}, {90.7, .2}, {88.9, .1}, {86.4, .3}, {81.8, .3}},
     {{94.1, .1}, {93.4, .1}, {92.2, .3}, {90.4, .2}, {86.9, .4}}},
};

const Table kCifar100 = {
    // snip
    {{{66.9, .5}, {65.2, .4}, {62.8, .7}, {56.7, 1.4}, {38.2, 1.8}},
     {{64.3, .2}, {60.6, 1.1}, {52.5, 1.5}, {41.9, .9}, {24.4, .5}},
     {{66.3, .5}, {61.9, 2.2}, {53.9, 1.7}, {46.4, 2.2}, {28.9, 1.3}},
     {{72.4, .2}, {70.4, .2}, {67.8, .2}, {63.3, .2}, {51.2, 1.2}}},
    // grasp
    {{{66.5, .3}, {64.5, .4}, {62.6, .2}, {59.6, .1}, {52.2, .5}},
     {{63.7, .3}, {60.4, .3}, {54.2, .3}, {45.9, .1}, {31.2, 1.3}},
     {{66.0, .4}, {63.3, .2}, {59.8, .6}, {52.8, .4}, {38.1, .7}},
     {{71.9, .3}, {69.9, .5}, {67.7, .3}, {64.2, .6}, {55.1, 1.1}}},
    // synflow
    {{{67.4, .3}, {65.1, .0}, {63.2, .3}, {60.5, .2}, {54.7, .1}},
     {{63.9, .1}, {58.9, .4}, {50.1, .1}, {38.2, .6}, {19.2, 2.5}},
     {{66.2, .1}, {62.5, .2}, {55.3, .2}, {44.0, .3}, {24.1, 1.0}},
     {{71.8, .2}, {69.3, .5}, {66.1, .4}, {60.5, .0}, {48.7, .3}}},
    // prospr
    {{{67.3, .3}, {64.8, .6}, {62.9, .2}, {59.6, .1}, {52.2, .4}},
     {{64.1, .1}, {60.0, .7}, {50.9, .9}, {31.7, 3.2}, {26.5, 1.1}},
     {{66.2, .2}, {62.9, .5}, {54.0, 3.5}, {35.2, 6.3}, {4.4, 2.7}},
     {{72.4, .5}, {70.5, .3}, {67.9, .3}, {61.5, .4}, {45.1, 3.2}}},
    // uniform
    {{{66.4, .2}, {63.6, .4}, {59.9, .1}, {54.8, .6}, {43.6, 1.2}},
     {{63.1, .3}, {59.5, .4}, {52.2, .8}, {39.1, 3.0}, {18.2, .9}},
     {{65.4, .3}, {62.3, .8}, {56.8, .4}, {46.1, 1.0}, {23.5, 1.4}},
     {{72.0, .2}, {69.7, .5}, {67.2, .1}, {62.7, .5}, {45.6, 2.0}}},
    // er
    {{{64.8, .3}, {62.3, .1}, {59.9, .4}, {55.6, .1}, {47.5, .8}},
     {{64.6, .5}, {61.4, .2}, {55.8, .4}, {47.2, .5}, {33.7, .5}},
     {{66.4, .3}, {64.3, .3}, {59.7, .3}, {53.6, .8}, {40.9, .5}},
     {{72.2, .3}, {70.2, .4}, {68.0, .6}, {64.1, .4}, {56.1, .4}}},
    // erk
    {{{65.1, .5}, {62.0, .1}, {59.0, .4}, {56.0, .2}, {47.3, .1}},
     {{65.4, .5}, {61.8, .2}, {55.8, 1.2}, {47.2, .1}, {33.6, .6}},
     {{66.7, .6}, {64.7, .5}, {60.2, .4}, {53.0, .1}, {40.8, .5}},
     {{72.4, .4}, {70.7, .1}, {68.1, .1}, {64.7, .6}, {56.3, .1}}},
};

const Table kTinyImagenet = {
    // snip
    {{{45.9, .2}, {43.7, .6}, {37.3, .2}, {29.2, 1.0}, {16.6, 1.5}},
     {{41.5, .3}, {34.2, 1.5}, {27.2, .5}, {19.8, .3}, {10.8, .6}},
     {{41.9, 1.9}, {34.6, .6}, {28.4, .6}, {20.5, 1.4}, {13.6, 1.1}},
     {{48.7, .3}, {47.8, .5}, {44.5, .9}, {38.3, .8}, {27.8, .6}}},
    // grasp
    {{{45.2, .5}, {44.5, .4}, {42.6, .5}, {39.0, .3}, {31.6, .4}},
     {{41.1, .4}, {36.4, .6}, {30.5, .2}, {23.2, 1.2}, {13.0, .4}},
     {{44.2, .3}, {40.3, .7}, {34.2, .2}, {27.7, .1}, {17.6, .2}},
     {{47.8, .8}, {46.9, .7}, {44.0, .3}, {39.3, .4}, {30.8, .7}}},
    // synflow
    {{{46.2, .2}, {45.0, .3}, {43.2, .4}, {40.0, .4}, {32.6, .7}},
     {{41.4, .1}, {33.7, .4}, {24.4, .3}, {13.9, .4}, {6.1, .8}},
     {{44.4, .3}, {37.6, .7}, {27.2, .2}, {16.9, .8}, {7.0, 1.4}},
     {{48.5, .5}, {46.0, .1}, {41.2, .4}, {33.6, .5}, {21.2, .9}}},
    // prospr
    {{{46.3, .4}, {45.7, .9}, {43.1, .4}, {39.3, .3}, {31.8, .8}},
     {{40.4, 1.1}, {34.6, .1}, {22.0, 1.0}, {11.1, 1.5}, {10.8, .0}},
     {{44.3, .9}, {37.5, .4}, {24.3, 2.1}, {11.5, 1.7}, {-1.0, -1.0}},
     {{49.3, .3}, {47.1, .4}, {43.8, .3}, {34.9, .9}, {27.5, .1}}},
    // uniform
    {{{45.6, .5}, {43.8, .3}, {40.3, .3}, {34.9, .4}, {25.7, .2}},
     {{40.4, .1}, {35.3, .3}, {28.5, .3}, {20.5, .4}, {9.3, 1.4}},
     {{44.2, .3}, {39.0, .6}, {32.4, .1}, {24.1, 1.0}, {11.9, 2.4}},
     {{47.7, .9}, {46.1, .4}, {41.7, .8}, {36.0, .4}, {25.3, .8}}},
    // er
    {{{44.4, .4}, {43.7, .2}, {40.3, .4}, {36.3, .5}, {28.5, .4}},
     {{43.1, .7}, {37.8, .3}, {32.2, .4}, {25.6, .2}, {15.1, .4}},
     {{46.6, .2}, {42.2, .6}, {36.1, .3}, {29.2, .1}, {21.1, .5}},
     {{49.3, .4}, {48.0, .3}, {44.6, .3}, {39.9, .4}, {31.5, .3}}},
    // erk
    {{{44.1, .3}, {43.0, .4}, {40.9, .1}, {35.8, .2}, {28.6, .3}},
     {{43.8, .5}, {38.6, .4}, {32.1, .0}, {25.4, .2}, {15.6, .2}},
     {{46.3, .1}, {42.3, .3}, {35.8, .4}, {28.7, .6}, {19.6, .5}},
     {{48.9, .2}, {48.1, .2}, {44.4, .4}, {39.6, .5}, {31.6, .5}}},
};

// dense baselines, [dataset][architecture]
const Cell kDense[3][4] = {
    {{93.2, .0}, {91.7, .1}, {92.3, .1}, {94.4, .1}},
    {{68.5, .2}, {66.4, .3}, {68.0, .3}, {74.2, .2}},
    {{46.1, .4}, {46.3, .3}, {48.0, .5}, {48.6, .2}},
};

const Table* table_for(int dataset) {
  switch (dataset) {
    case 0: return &kCifar10;
    case 1: return &kCifar100;
    default: return &kTinyImagenet;
  }
}

}  // namespace

std::vector<std::string> fixture_datasets() {
  return {kDatasets, kDatasets + 3};
}

std::vector<std::string> fixture_algorithms() {
  return {kAlgos, kAlgos + 7};
}

std::vector<double> fixture_sparsities() {
  return {kSparsities, kSparsities + 5};
}

std::vector<AccuracyRecord> fixture_accuracy() {
  std::vector<AccuracyRecord> out;
  out.reserve(7 * 4 * 5 * 3);
  for (int ds = 0; ds < 3; ++ds) {
    const Table& t = *table_for(ds);
    for (int alg = 0; alg < 7; ++alg) {
      for (int arch = 0; arch < 4; ++arch) {
        for (int sp = 0; sp < 5; ++sp) {
          const Cell& c = t[alg][arch][sp];
          if (c.acc < 0) continue;
          AccuracyRecord r;
          r.architecture = kArchs[arch];
          r.dataset = kDatasets[ds];
          r.algorithm = kAlgos[alg];
          r.sparsity = kSparsities[sp];
          r.run = 0;
          r.acc = c.acc;
          r.acc_dense = kDense[ds][arch].acc;
          r.acc_std = c.dev;
          r.has_std = true;
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

std::string fixture_accuracy_csv() {
  return accuracy_csv(fixture_accuracy());
}

double fixture_dense_accuracy(const std::string& architecture, const std::string& dataset) {
  for (int ds = 0; ds < 3; ++ds) {
    if (dataset != kDatasets[ds]) continue;
    for (int arch = 0; arch < 4; ++arch) {
      if (architecture == kArchs[arch]) return kDense[ds][arch].acc;
    }
  }
  throw Error(errc::invalid_argument,
              "no bundled accuracy data for " + architecture + " on " + dataset);
}

std::string fixture_architecture_json(const std::string& name) {
  return architecture_to_json(builtin_architecture(name, 32, 32, 10));
}

}  // namespace snntopo
