import type { Hyper, ModelName } from "../config";
import { Alad } from "./alad";
import { DeepSvdd, MemAe, ZooDae } from "./autoencoders";
import type { ZooModel } from "./base";
import { Dagmm, SomDagmm } from "./dagmm";
import { Drocc } from "./drocc";
import { Dsebm } from "./dsebm";
import { Duad } from "./duad";
import { NeuTraLad } from "./neutralad";
import { OcSvm } from "./ocsvm";

export function buildModel(name: ModelName, hyper: Hyper): ZooModel {
  switch (name) {
    case "ocsvm":
      return new OcSvm(hyper);
    case "dae":
      return new ZooDae(hyper);
    case "deepsvdd":
      return new DeepSvdd(hyper);
    case "memae":
      return new MemAe(hyper);
    case "dagmm":
      return new Dagmm(hyper);
    case "som-dagmm":
      return new SomDagmm(hyper);
    case "dsebm-e":
      return new Dsebm(hyper, "energy");
    case "dsebm-r":
      return new Dsebm(hyper, "reconstruction");
    case "drocc":
      return new Drocc(hyper);
    case "alad":
      return new Alad(hyper);
    case "neutralad":
      return new NeuTraLad(hyper);
    case "duad":
      return new Duad(hyper);
  }
}
