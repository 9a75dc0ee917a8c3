// The stock demo canvas: a button drives a toggling lamp and a counter
// whose indicator lights on the third press; a display card subscribes
// to the counter and shows the confirmation text.

import { makeCard, makeModel, type CanvasModel } from "./model.js";

export const BUTTON_PROGRAM = "s ?h/push !e/push s";

export const LAMP_PROGRAM = `off ?e/push !h/led,on on
on ?e/push !h/led,off off`;

export const COUNTER_PROGRAM = `x ?e/push !l/=(count,2) c
c ?e/push !l/-=(count,1) c
c ?l/==(count,0) !e/reached !h/led,on lit`;

export const DISPLAY_PROGRAM = "s ?e/reached !h/notify,OK s";

export function demoCanvas(): CanvasModel {
  return makeModel(
    [
      makeCard("button", "button", BUTTON_PROGRAM),
      makeCard("lamp", "led", LAMP_PROGRAM),
      makeCard("counter", "led", COUNTER_PROGRAM),
      makeCard("display", "notification", DISPLAY_PROGRAM),
    ],
    [
      { from: "button", to: "lamp" },
      { from: "button", to: "counter" },
      { from: "counter", to: "display" },
    ],
  );
}
