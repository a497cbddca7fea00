from model.gates.gates import Axis, GellMannGenerator, RotationGate, QuditCnot
from model.circuit.circuit import AnsatzTemplate, Circuit, Observable, PureState
from model.gradient.gradient import ParamIndex
